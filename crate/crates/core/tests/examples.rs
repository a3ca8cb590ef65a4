//! Every example runs to completion.

macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }

        #[test]
        fn $name() {
            $name::run().expect(stringify!($name));
        }
    };
}

example!(rank_informed_assessment);
example!(decision_rules);
example!(aggregate_and_compare);
example!(parse_transcripts);
example!(llm_scoring_mock);
example!(deliberation_session);
example!(serve);
example!(file_formats);
