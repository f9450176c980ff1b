use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use semlink::codec::*;
use semlink::Error;
use serde_json::Value;

const CONTRACT: &str = include_str!("../fixtures/gateway_contract.json");

struct Recorded {
    method: String,
    path: String,
    content_type: Option<String>,
    body: Value,
}

fn read_request(stream: &mut TcpStream) -> Recorded {
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut line = String::new();
    reader.read_line(&mut line).unwrap();
    let mut parts = line.split_whitespace();
    let method = parts.next().unwrap().to_string();
    let path = parts.next().unwrap().to_string();
    let mut len = None;
    let mut chunked = false;
    let mut content_type = None;
    loop {
        let mut h = String::new();
        reader.read_line(&mut h).unwrap();
        let h = h.trim_end();
        if h.is_empty() {
            break;
        }
        let (k, v) = h.split_once(':').unwrap();
        match k.to_ascii_lowercase().as_str() {
            "content-length" => len = Some(v.trim().parse::<usize>().unwrap()),
            "transfer-encoding" => chunked = v.trim().eq_ignore_ascii_case("chunked"),
            "content-type" => content_type = Some(v.trim().to_string()),
            _ => {}
        }
    }
    let mut body = Vec::new();
    if let Some(n) = len {
        body.resize(n, 0);
        reader.read_exact(&mut body).unwrap();
    } else if chunked {
        loop {
            let mut size = String::new();
            reader.read_line(&mut size).unwrap();
            let n = usize::from_str_radix(size.trim(), 16).unwrap();
            let mut chunk = vec![0; n + 2];
            reader.read_exact(&mut chunk).unwrap();
            if n == 0 {
                break;
            }
            body.extend_from_slice(&chunk[..n]);
        }
    }
    Recorded {
        method,
        path,
        content_type,
        body: serde_json::from_slice(&body).unwrap(),
    }
}

fn reason(status: u16) -> &'static str {
    match status {
        200 => "OK",
        400 => "Bad Request",
        503 => "Service Unavailable",
        _ => "Status",
    }
}

/// Serves one canned response per connection and reports each request.
fn fake_gateway(responses: Vec<(u16, String)>) -> (String, mpsc::Receiver<Recorded>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        for (status, body) in responses {
            let (mut stream, _) = listener.accept().unwrap();
            let req = read_request(&mut stream);
            tx.send(req).unwrap();
            let head = format!(
                "HTTP/1.1 {status} {}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
                reason(status),
                body.len()
            );
            stream.write_all(head.as_bytes()).unwrap();
            stream.write_all(body.as_bytes()).unwrap();
        }
    });
    (url, rx)
}

fn contract_cases() -> Vec<Value> {
    let v: Value = serde_json::from_str(CONTRACT).unwrap();
    v["cases"].as_array().unwrap().clone()
}

#[test]
fn contract_fixture_matches_wire_types() {
    for case in contract_cases() {
        let name = case["name"].as_str().unwrap();
        let req = &case["request"];
        match case["path"].as_str().unwrap() {
            "/v1/caption" => {
                let parsed: CaptionRequest = serde_json::from_value(req.clone()).unwrap();
                assert_eq!(&serde_json::to_value(&parsed).unwrap(), req, "{name}");
                if case["status"] == 200 {
                    let resp: CaptionResponse =
                        serde_json::from_value(case["response"].clone()).unwrap();
                    assert_eq!(
                        serde_json::to_value(&resp).unwrap(),
                        case["response"],
                        "{name}"
                    );
                }
            }
            "/v1/generate" => {
                let parsed: GenerateRequest = serde_json::from_value(req.clone()).unwrap();
                assert_eq!(&serde_json::to_value(&parsed).unwrap(), req, "{name}");
                if case["status"] == 200 {
                    let resp: GenerateResponse =
                        serde_json::from_value(case["response"].clone()).unwrap();
                    assert_eq!(
                        serde_json::to_value(&resp).unwrap(),
                        case["response"],
                        "{name}"
                    );
                }
            }
            p => panic!("unknown path {p}"),
        }
        if case["status"] != 200 {
            assert!(case["response"]["error"].is_string(), "{name}");
        }
    }
}

#[test]
fn client_replays_contract_cases() {
    let cases = contract_cases();
    let responses = cases
        .iter()
        .map(|c| {
            (
                c["status"].as_u64().unwrap() as u16,
                c["response"].to_string(),
            )
        })
        .collect();
    let (url, rx) = fake_gateway(responses);
    let codec = RemoteCodec::with_options(format!("{url}/"), Duration::from_secs(10), 30);
    for case in &cases {
        let name = case["name"].as_str().unwrap();
        let status = case["status"].as_u64().unwrap() as u16;
        let result: Result<Value, Error> = match case["path"].as_str().unwrap() {
            "/v1/caption" => codec
                .caption(&serde_json::from_value(case["request"].clone()).unwrap())
                .map(|r| serde_json::to_value(r).unwrap()),
            _ => codec
                .generate(&serde_json::from_value(case["request"].clone()).unwrap())
                .map(|r| serde_json::to_value(r).unwrap()),
        };
        let seen = rx.recv_timeout(Duration::from_secs(5)).unwrap();
        assert_eq!(seen.method, "POST", "{name}");
        assert_eq!(seen.path, case["path"], "{name}");
        assert!(
            seen.content_type.unwrap().starts_with("application/json"),
            "{name}"
        );
        assert_eq!(seen.body, case["request"], "{name}");
        match result {
            Ok(v) => {
                assert_eq!(status, 200, "{name}");
                assert_eq!(v, case["response"], "{name}");
            }
            Err(Error::Protocol { status: s, message }) => {
                assert_eq!(s, status, "{name}");
                assert_eq!(
                    message,
                    case["response"]["error"].as_str().unwrap(),
                    "{name}"
                );
            }
            Err(e) => panic!("{name}: {e}"),
        }
    }
}

#[test]
fn codec_trait_round_trip_over_http() {
    let img = ImageRaster::new(2, 2, [200, 10, 10].repeat(4)).unwrap();
    let png = base64_png(&img);
    let (url, rx) = fake_gateway(vec![
        (200, r#"{"text":"a red square"}"#.into()),
        (200, format!(r#"{{"image_b64":"{png}"}}"#)),
    ]);
    let codec = RemoteCodec::with_options(url, Duration::from_secs(10), 12);
    let text = codec.semantic_encode(&img, Some("Describe.")).unwrap();
    assert_eq!(text.text, "a red square");
    let req = rx.recv().unwrap();
    assert_eq!(req.body["prompt"], "Describe.");
    let sent =
        ImageRaster::from_png_bytes(&decode_b64(req.body["image_b64"].as_str().unwrap())).unwrap();
    assert_eq!(sent, img);

    let out = codec.semantic_decode(&text, 77).unwrap();
    assert_eq!(out, img);
    let req = rx.recv().unwrap();
    assert_eq!(
        req.body,
        serde_json::json!({"prompt": "a red square", "seed": 77, "steps": 12})
    );
}

#[test]
fn empty_caption_and_bad_payloads_are_protocol_errors() {
    let img = ImageRaster::new(1, 1, vec![0, 0, 0]).unwrap();
    let (url, _rx) = fake_gateway(vec![
        (200, r#"{"text":""}"#.into()),
        (200, r#"{"image_b64":"%%%"}"#.into()),
        (200, r#"{"unexpected":1}"#.into()),
        (503, "model unavailable".into()),
    ]);
    let codec = RemoteCodec::with_options(url, Duration::from_secs(10), 30);
    assert!(matches!(
        codec.semantic_encode(&img, None),
        Err(Error::Protocol { status: 200, .. })
    ));
    let t = TextKnowledge::new("x");
    assert!(matches!(
        codec.semantic_decode(&t, 0),
        Err(Error::Protocol { status: 200, .. })
    ));
    assert!(matches!(
        codec.semantic_decode(&t, 0),
        Err(Error::Protocol { status: 200, .. })
    ));
    match codec.semantic_decode(&t, 0) {
        Err(Error::Protocol {
            status: 503,
            message,
        }) => assert_eq!(message, "model unavailable"),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        codec.semantic_decode(&TextKnowledge::new(""), 0),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn unreachable_and_slow_gateways_are_transport_errors() {
    // bound then dropped: nothing listens on the port
    let port = TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let codec = RemoteCodec::with_options(
        format!("http://127.0.0.1:{port}"),
        Duration::from_secs(5),
        30,
    );
    let img = ImageRaster::new(1, 1, vec![0, 0, 0]).unwrap();
    assert!(matches!(
        codec.semantic_encode(&img, None),
        Err(Error::Transport(_))
    ));

    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let hold = thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        thread::sleep(Duration::from_millis(1500));
        drop(stream);
    });
    let codec = RemoteCodec::with_options(url, Duration::from_millis(300), 30);
    let started = std::time::Instant::now();
    assert!(matches!(
        codec.semantic_encode(&img, None),
        Err(Error::Transport(_))
    ));
    assert!(started.elapsed() < Duration::from_millis(1400));
    hold.join().unwrap();
}

fn base64_png(img: &ImageRaster) -> String {
    use base64::Engine;
    base64::engine::general_purpose::STANDARD.encode(img.to_png_bytes().unwrap())
}

fn decode_b64(s: &str) -> Vec<u8> {
    use base64::Engine;
    base64::engine::general_purpose::STANDARD.decode(s).unwrap()
}
