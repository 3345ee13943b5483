//! The HTTP contract, exercised in-process through the router.

use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use lff_service::usage::{by_day, read_events};
use lff_service::{router, AppState, Config};
use serde_json::{json, Value};
use tower::ServiceExt;

const MARY: &str = include_str!("../../../corpus/mary-lamb/problem.lff");
const GAMES: &str = include_str!("../../../corpus/logic-games/problem.lff");

/// Nine pigeons, eight holes: hard enough to run into any short deadline.
const PIGEONS: &str =
    "Sorts:\n  pigeon enum: p1, p2, p3, p4, p5, p6, p7, p8, p9.\n  hole enum: h1, h2, h3, h4, h5, h6, h7, h8.\n\
Vocabulary:\n  function { h(pigeon): hole. }\nConstraints:\n  ALL x, y (x /= y -> h(x) /= h(y)).\n";

fn boxes(text: &str) -> Value {
    let (mut s, mut v, mut c) = (String::new(), String::new(), String::new());
    let mut at = 0;
    for line in text.lines() {
        match line.trim() {
            "Sorts:" => at = 1,
            "Vocabulary:" => at = 2,
            "Constraints:" => at = 3,
            _ => {
                let b = match at {
                    1 => &mut s,
                    2 => &mut v,
                    _ => &mut c,
                };
                b.push_str(line);
                b.push('\n');
            }
        }
    }
    json!({ "sorts": s, "vocabulary": v, "constraints": c })
}

struct Client {
    app: Router,
    cookie: Option<String>,
}

impl Client {
    fn new(config: &Config) -> Client {
        Client { app: router(Arc::new(AppState::new(config).unwrap())), cookie: None }
    }

    fn with_app(app: Router) -> Client {
        Client { app, cookie: None }
    }

    async fn send(&mut self, method: &str, uri: &str, body: Option<Vec<u8>>) -> (StatusCode, Value) {
        let mut req = Request::builder().method(method).uri(uri).header(header::CONTENT_TYPE, "application/json");
        if let Some(c) = &self.cookie {
            req = req.header(header::COOKIE, c);
        }
        let res = self.app.clone().oneshot(req.body(body.map_or_else(Body::empty, Body::from)).unwrap()).await.unwrap();
        if let Some(set) = res.headers().get(header::SET_COOKIE) {
            self.cookie = Some(set.to_str().unwrap().split(';').next().unwrap().to_string());
        }
        let status = res.status();
        let bytes = res.into_body().collect().await.unwrap().to_bytes();
        (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
    }

    async fn post(&mut self, uri: &str, body: &Value) -> (StatusCode, Value) {
        self.send("POST", uri, Some(serde_json::to_vec(body).unwrap())).await
    }
}

fn config() -> Config {
    Config { workers: 4, ..Config::default() }
}

#[tokio::test]
async fn check_reports_golden_diagnostics() {
    let mut c = Client::new(&config());
    let (s, v) = c.post("/api/check", &boxes(MARY)).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["ok"], true);
    assert_eq!(v["diagnostics"], json!([]));

    let bad = MARY.replace("Constraints:\n", "Constraints:\n  had(Mary, SOME x lamb(x)).\n");
    let (s, v) = c.post("/api/check", &boxes(&bad)).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["ok"], false);
    let d = &v["diagnostics"];
    assert_eq!(d.as_array().unwrap().len(), 1);
    assert_eq!(d[0]["message"], "Type mismatch with argument of had");
    let text = d[0]["text"].as_str().unwrap();
    assert!(text.contains("the main operator \"had\" expects argument 2 to be of type animal\nbut argument 2 is\n    SOME x lamb(x)\nwhich is of type bool.\n"), "{text}");
    assert!(d[0]["line"].as_u64().unwrap() > 0);

    let (s, v) =
        c.post("/api/check", &json!({ "sorts": "s.", "vocabulary": "predicate { p(s). }", "constraints": "" })).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["ok"], true);
    assert!(
        v["warnings"].as_array().unwrap().iter().any(|w| w["message"].as_str().unwrap().contains("no constraints")),
        "{v}"
    );

    let (s, v) = c.post("/api/check", &json!({ "sorts": "s.", "vocabulary": "", "constraints": "ALL x p(x" })).await;
    assert_eq!(s, StatusCode::OK);
    assert!(v["diagnostics"][0]["partialTree"].is_string(), "{v}");
}

#[tokio::test]
async fn solve_outcomes() {
    let mut c = Client::new(&config());
    let (_, v) = c.post("/api/solve", &boxes(GAMES)).await;
    assert_eq!(v["kind"], "solutions");
    assert_eq!(v["modelCount"], 1);
    assert_eq!(v["unique"], true);
    assert_eq!(v["exhausted"], true);

    let (_, v) = c.post("/api/solve", &boxes(MARY)).await;
    assert_eq!(v["kind"], "solutions");
    assert!(v["modelCount"].as_u64().unwrap() >= 2);
    assert_eq!(v["unique"], false);
    assert!(v["groups"][0]["models"][0]["functions"].is_array());

    let (_, v) = c
        .post(
            "/api/solve",
            &json!({ "sorts": "s.", "vocabulary": "predicate { p(s). }", "constraints": "ALL x p(x).\nSOME x ~p(x)." }),
        )
        .await;
    assert_eq!(v["kind"], "no-solution");
    assert_eq!(v["complete"], true);
    assert_eq!(v["stats"]["bounds"]["s"], json!([1, 4]));

    let mut req = boxes(PIGEONS);
    req["options"] = json!({ "timeoutSecs": 0.5 });
    let start = Instant::now();
    let (s, v) = c.post("/api/solve", &req).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["kind"], "timeout");
    assert!(start.elapsed() < Duration::from_millis(1500));
}

#[tokio::test]
async fn solving_is_stateless() {
    let mut c = Client::new(&config());
    let strip = |mut v: Value| {
        v["stats"]["wallMs"] = Value::Null;
        v
    };
    let (_, a) = c.post("/api/solve", &boxes(MARY)).await;
    let (_, b) = c.post("/api/solve", &boxes(MARY)).await;
    assert_eq!(strip(a), strip(b));
}

#[tokio::test]
async fn diagnose_reports() {
    let mut c = Client::new(&config());
    let toy = |kind: &str| json!({ "sorts": "", "vocabulary": "predicate { p. q. }", "constraints": "p.\n~p.\nq.\n", "kind": kind });
    let (_, v) = c.post("/api/diagnose", &toy("mus")).await;
    assert_eq!(v["kind"], "mus");
    let idx: Vec<u64> = v["constraints"].as_array().unwrap().iter().map(|c| c["index"].as_u64().unwrap()).collect();
    assert_eq!(idx, vec![0, 1]);
    assert_eq!(v["constraints"][1]["text"], "~p.");

    let (_, v) = c.post("/api/diagnose", &toy("approx")).await;
    assert_eq!(v["kind"], "approximate");
    assert_eq!(v["satisfiedCount"], 2);

    let mut games = boxes(&format!("{GAMES}  SOME y (y /= Cougars & result(Cougars,y) = draw).\n"));
    games["kind"] = json!("mus");
    let (_, v) = c.post("/api/diagnose", &games).await;
    assert_eq!(v["kind"], "mus");
    assert!(
        v["constraints"].as_array().unwrap().iter().any(|c| c["text"].as_str().unwrap().contains("Cougars,y) = draw)")),
        "{v}"
    );

    let mut sat = boxes(MARY);
    sat["kind"] = json!("mus");
    let (s, v) = c.post("/api/diagnose", &sat).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["kind"], "nothing-to-diagnose");

    let (s, _) = c.post("/api/diagnose", &toy("guess")).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn transport_errors() {
    let mut c = Client::new(&config());
    let (s, _) = c.send("POST", "/api/solve", Some(b"{\"sorts\": ".to_vec())).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = c.send("POST", "/api/check", Some(b"[1, 2]".to_vec())).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let big = json!({ "sorts": "", "vocabulary": "", "constraints": "% x\n".repeat(70_000) });
    let (s, _) = c.post("/api/check", &big).await;
    assert_eq!(s, StatusCode::PAYLOAD_TOO_LARGE);
    let (s, _) = c.post("/api/solve", &json!({ "constraints": "", "options": { "maxModels": 0 } })).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn puzzles() {
    let mut c = Client::new(&config());
    let (_, v) = c.send("GET", "/api/puzzles?level=Advanced", None).await;
    assert!(v.as_array().unwrap().iter().any(|p| p["id"] == "logic-games"));
    let (_, v) = c.send("GET", "/api/puzzles?level=beginner", None).await;
    assert!(v.as_array().unwrap().iter().any(|p| p["id"] == "mary-lamb"));
    let (_, v) = c.send("GET", "/api/puzzles", None).await;
    assert_eq!(v.as_array().unwrap().len(), 9);
    let (s, _) = c.send("GET", "/api/puzzles?level=Wizard", None).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);

    let (s, v) = c.send("GET", "/api/puzzles/logic-games", None).await;
    assert_eq!(s, StatusCode::OK);
    assert!(v["statement"].as_str().unwrap().contains("Buccaneers beat only the Cougars"));
    assert_eq!(v["skeleton"]["sorts"], "");
    let (_, v) = c.send("GET", "/api/puzzles/logic-games?prefill=true", None).await;
    assert!(v["skeleton"]["sorts"].as_str().unwrap().contains("team enum"));
    assert_eq!(v["skeleton"]["constraints"], "");
    let (s, _) = c.send("GET", "/api/puzzles/nope", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn saves_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Config { data_dir: Some(dir.path().to_path_buf()), ..config() };
    let mut alice = Client::new(&cfg);
    let mut sub = boxes(MARY);
    sub["constraints"] = json!("  odd \u{00e9} spacing\t\r\n  % trailing   \n\n");
    sub["options"] = json!({ "maxModels": 5 });
    let (s, created) = alice.post("/api/saves", &json!({ "name": "lamb", "submission": sub })).await;
    assert_eq!(s, StatusCode::CREATED);
    let id = created["saveId"].as_str().unwrap().to_string();
    let (s, got) = alice.send("GET", &format!("/api/saves/{id}"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(got["submission"], sub);
    assert_eq!(
        got["submission"]["constraints"].as_str().unwrap().as_bytes(),
        sub["constraints"].as_str().unwrap().as_bytes()
    );

    let (s, _) = alice.post("/api/saves", &json!({ "name": "lamb", "submission": sub })).await;
    assert_eq!(s, StatusCode::CONFLICT);

    // Another session cannot see it.
    let mut bob = Client::with_app(alice.app.clone());
    let (s, _) = bob.send("GET", &format!("/api/saves/{id}"), None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (_, list) = bob.send("GET", "/api/saves", None).await;
    assert_eq!(list, json!([]));

    // Optimistic update.
    let stamp = got["updatedAt"].clone();
    let put =
        |sub: &Value, stamp: &Value| serde_json::to_vec(&json!({ "submission": sub, "updatedAt": stamp })).unwrap();
    let mut sub2 = sub.clone();
    sub2["sorts"] = json!("person.\n");
    let (s, updated) = alice.send("PUT", &format!("/api/saves/{id}"), Some(put(&sub2, &stamp))).await;
    assert_eq!(s, StatusCode::OK);
    assert_ne!(updated["updatedAt"], stamp);
    let (s, _) = alice.send("PUT", &format!("/api/saves/{id}"), Some(put(&sub, &stamp))).await;
    assert_eq!(s, StatusCode::CONFLICT);

    // Persisted across restarts.
    let mut again = Client::new(&cfg);
    again.cookie = alice.cookie.clone();
    let (_, got) = again.send("GET", &format!("/api/saves/{id}"), None).await;
    assert_eq!(got["submission"], sub2);

    let (s, _) = alice.send("DELETE", &format!("/api/saves/{id}"), None).await;
    assert_eq!(s, StatusCode::NO_CONTENT);
    let (s, _) = alice.send("GET", &format!("/api/saves/{id}"), None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn usage_log_counts_requests() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("usage.jsonl");
    let mut c = Client::new(&Config { log_path: Some(log.clone()), ..config() });
    let mut sent = Vec::new();
    for i in 0..5 {
        let text = json!({ "sorts": "", "vocabulary": "predicate { p. }", "constraints": format!("p.\n% run {i}\n") });
        let uri = ["/api/check", "/api/solve", "/api/diagnose"][i % 3];
        let (s, _) = c.post(uri, &text).await;
        assert_eq!(s, StatusCode::OK);
        sent.push(text);
    }
    c.send("GET", "/api/puzzles", None).await;
    c.send("POST", "/api/solve", Some(b"nonsense".to_vec())).await;

    let events = read_events(&log).unwrap();
    assert_eq!(events.len(), 5);
    assert_eq!(by_day(&events).iter().map(|(_, n)| n).sum::<usize>(), 5);
    let session = c.cookie.as_deref().unwrap().split_once('=').unwrap().1;
    assert!(events.iter().all(|e| e.session_id == session));
    assert_eq!(events[4].full_text, "Sorts:\n\nVocabulary:\npredicate { p. }\nConstraints:\np.\n% run 4\n");
    assert_eq!(events[2].outcome_kind, "nothing-to-diagnose");
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn saturation_gives_503() {
    let app = router(Arc::new(AppState::new(&Config { workers: 1, queue_depth: 0, ..Config::default() }).unwrap()));
    let mut slow = boxes(PIGEONS);
    slow["options"] = json!({ "timeoutSecs": 1.5 });
    let first = {
        let mut c = Client::with_app(app.clone());
        tokio::spawn(async move { c.post("/api/solve", &slow).await })
    };
    tokio::time::sleep(Duration::from_millis(300)).await;
    let mut c = Client::with_app(app.clone());
    let req = Request::builder().method("POST").uri("/api/check").body(Body::from(r#"{"constraints": ""}"#)).unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    assert_eq!(res.status(), StatusCode::SERVICE_UNAVAILABLE);
    assert_eq!(res.headers()[header::RETRY_AFTER], "1");
    assert_eq!(first.await.unwrap().1["kind"], "timeout");
    let (s, _) = c.post("/api/check", &json!({ "constraints": "" })).await;
    assert_eq!(s, StatusCode::OK);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_solves_meet_their_deadline() {
    let workers = 4;
    let app = router(Arc::new(AppState::new(&Config { workers, ..Config::default() }).unwrap()));
    let mut req = boxes(PIGEONS);
    req["options"] = json!({ "timeoutSecs": 1 });
    let handles: Vec<_> = (0..workers)
        .map(|_| {
            let mut c = Client::with_app(app.clone());
            let req = req.clone();
            tokio::spawn(async move {
                let start = Instant::now();
                let (s, v) = c.post("/api/solve", &req).await;
                (s, v["kind"].clone(), start.elapsed())
            })
        })
        .collect();
    for h in handles {
        let (s, kind, took) = h.await.unwrap();
        assert_eq!(s, StatusCode::OK);
        assert_eq!(kind, "timeout");
        assert!(took < Duration::from_secs(2), "{took:?}");
    }
}

#[tokio::test]
async fn session_cookie_is_issued_once() {
    let mut c = Client::new(&config());
    let res = c.app.clone().oneshot(Request::get("/api/puzzles").body(Body::empty()).unwrap()).await.unwrap();
    let set = res.headers()[header::SET_COOKIE].to_str().unwrap();
    assert!(set.starts_with("lff_session=") && set.contains("HttpOnly"));
    c.cookie = Some(set.split(';').next().unwrap().to_string());
    let req =
        Request::get("/api/puzzles").header(header::COOKIE, c.cookie.clone().unwrap()).body(Body::empty()).unwrap();
    let res = c.app.clone().oneshot(req).await.unwrap();
    assert!(res.headers().get(header::SET_COOKIE).is_none());
}

#[tokio::test]
async fn serves_over_tcp() {
    use tokio::io::{AsyncReadExt, AsyncWriteExt};
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let app = router(Arc::new(AppState::new(&config()).unwrap()));
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    let mut s = tokio::net::TcpStream::connect(addr).await.unwrap();
    s.write_all(b"GET /api/puzzles/mary-lamb HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n").await.unwrap();
    let mut buf = String::new();
    s.read_to_string(&mut buf).await.unwrap();
    assert!(buf.starts_with("HTTP/1.1 200"), "{buf}");
    assert!(buf.contains("\"id\":\"mary-lamb\""));
}
