// Start the session API on an ephemeral port and drive it with a blocking
// HTTP client, the way a browser front end would.

use policy_mcdm::service::{router, AppState};
use serde_json::{json, Value};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Runtime::new().expect("runtime");
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.expect("bind");
            tx.send(listener.local_addr().expect("addr")).expect("send addr");
            axum::serve(listener, router(AppState::default())).await.expect("serve");
        });
    });
    let base = format!("http://{}", rx.recv()?);
    let http = reqwest::blocking::Client::new();

    let created: Value = http.post(format!("{base}/sessions")).json(&json!({ "fixture": "informed_assessment" })).send()?.json()?;
    let id = created["session_id"].as_str().ok_or("no session id")?;
    println!("session {id}, borda order {}", created["rankings"]["orders"]["borda"]);

    let edit: Value = http
        .patch(format!("{base}/sessions/{id}/cells"))
        .json(&json!({ "alternative_id": 20, "criterion_id": "Q4", "value": 5.0, "actor": "demo" }))
        .send()?
        .json()?;
    println!("edit moved {} rule positions", edit["deltas"].as_array().map_or(0, Vec::len));

    let rejected = http
        .patch(format!("{base}/sessions/{id}/cells"))
        .json(&json!({ "alternative_id": 20, "criterion_id": "Q4", "value": 9.0 }))
        .send()?;
    println!("out-of-scale edit: {} {}", rejected.status(), rejected.text()?);

    let topsis: Value = http.get(format!("{base}/sessions/{id}/rankings?rules=topsis&criteria=Q1,Q2,Q3")).send()?.json()?;
    println!("topsis on Q1-Q3: {}", topsis["orders"]["topsis"]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
