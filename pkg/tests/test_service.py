import concurrent.futures

import pytest
from fastapi.testclient import TestClient

from uzannot import corpus_io
from uzannot.service import create_app
from uzannot.store import CorpusStore


@pytest.fixture
def store(tmp_path):
    with CorpusStore(tmp_path / "data") as s:
        yield s


@pytest.fixture
def client(store, seed_registry):
    with TestClient(create_app(store, seed_registry)) as c:
        yield c


def register_and_login(client, name="aziza", passphrase="pw") -> dict:
    r = client.post("/api/experts", json={"name": name, "passphrase": passphrase})
    assert r.status_code == 201, r.text
    r = client.post("/api/sessions", json={"name": name, "passphrase": passphrase})
    assert r.status_code == 201, r.text
    return {"Authorization": f"Bearer {r.json()['token']}"}


def ingest(client, auth, body, category="literature") -> dict:
    r = client.post("/api/texts", json={"body": body, "category": category}, headers=auth)
    assert r.status_code == 201, r.text
    return r.json()


def test_register_login_and_bad_credentials(client):
    auth = register_and_login(client)
    assert client.get("/api/stats", headers=auth).status_code == 200
    r = client.post("/api/sessions", json={"name": "aziza", "passphrase": "wrong"})
    assert r.status_code == 401


def test_duplicate_registration_conflict(client):
    register_and_login(client)
    r = client.post("/api/experts", json={"name": "aziza", "passphrase": "x"})
    assert r.status_code == 409


def test_endpoints_require_token(client):
    assert client.get("/api/stats").status_code == 401
    assert client.get("/api/stats", headers={"Authorization": "Bearer junk"}).status_code == 401


def test_ingest_splits_sentences(client):
    auth = register_and_login(client)
    out = ingest(client, auth, "Salim keldi. Anvar ketdi.")
    assert out["sentences"] == 2


def test_ingest_transliterates_cyrillic(client):
    auth = register_and_login(client)
    out = ingest(client, auth, "Тошкент катта шаҳар.")
    assert out["script"] == "CYRILLIC"
    r = client.get("/api/assignments/next", params={"mode": "M"}, headers=auth)
    assert r.json()["surface"] == "Toshkent katta shahar."


def test_tagset_endpoint(client, full_registry, store):
    # syntactic palette has 14 entries on the full tagset
    app_client = TestClient(create_app(store, full_registry))
    auth = register_and_login(app_client)
    r = app_client.get("/api/tagset", params={"kind": "S"}, headers=auth)
    assert r.status_code == 200
    assert len(r.json()["tags"]) == 14
    r = app_client.get("/api/tagset", params={"kind": "M"}, headers=auth)
    classes = [g["word_class"] for g in r.json()["groups"]]
    assert classes[0] == "NOUN"
    assert sum(len(g["tags"]) for g in r.json()["groups"]) == 102


def test_next_assignment_no_sentences(client):
    auth = register_and_login(client)
    r = client.get("/api/assignments/next", params={"mode": "M"}, headers=auth)
    assert r.status_code == 204


def test_submit_with_bad_tag_order_is_422(client):
    auth = register_and_login(client)
    ingest(client, auth, "Salim keldi")
    a = client.get("/api/assignments/next", params={"mode": "M"}, headers=auth).json()
    r = client.post(
        "/api/annotations",
        json={"assignment_id": a["assignment_id"], "line": "keldi/3B/SFL"},
        headers=auth,
    )
    assert r.status_code == 422
    rules = [f["rule"] for f in r.json()["detail"]["findings"]]
    assert "M2" in rules


def test_submit_unparseable_line_is_422(client):
    auth = register_and_login(client)
    ingest(client, auth, "Salim keldi")
    a = client.get("/api/assignments/next", params={"mode": "M"}, headers=auth).json()
    r = client.post(
        "/api/annotations",
        json={"assignment_id": a["assignment_id"], "line": "abc/"},
        headers=auth,
    )
    assert r.status_code == 422


def test_submit_unknown_assignment_404(client):
    auth = register_and_login(client)
    r = client.post(
        "/api/annotations",
        json={"assignment_id": "nope", "line": "a/SOT"},
        headers=auth,
    )
    assert r.status_code == 404


def test_full_happy_path_roundtrip(client):
    auth = register_and_login(client)
    ingest(client, auth, "Anvar to'satdan eshik yoniga keldi")
    line = "Anvar/SOT to'satdan/HRV eshik/NOT yoniga/JOT keldi/SFL/3B/OTZ"
    a = client.get("/api/assignments/next", params={"mode": "M"}, headers=auth).json()
    r = client.post(
        "/api/annotations",
        json={"assignment_id": a["assignment_id"], "line": line},
        headers=auth,
    )
    assert r.status_code == 201
    ann_id = r.json()["annotation_id"]
    r = client.post(f"/api/annotations/{ann_id}/confirm", headers=auth)
    assert r.status_code == 200
    txt = client.get("/api/export", params={"format": "txt"}, headers=auth).text
    assert line in txt.splitlines()
    # double confirm conflicts
    r = client.post(f"/api/annotations/{ann_id}/confirm", headers=auth)
    assert r.status_code == 409


def test_double_submit_conflict(client):
    auth = register_and_login(client)
    ingest(client, auth, "Salim keldi")
    a = client.get("/api/assignments/next", params={"mode": "M"}, headers=auth).json()
    body = {"assignment_id": a["assignment_id"], "line": "Salim/SOT keldi/SFL"}
    assert client.post("/api/annotations", json=body, headers=auth).status_code == 201
    assert client.post("/api/annotations", json=body, headers=auth).status_code == 409


def test_submit_on_foreign_assignment_conflict(client):
    auth1 = register_and_login(client, "a")
    auth2 = register_and_login(client, "b")
    ingest(client, auth1, "Salim keldi")
    a = client.get("/api/assignments/next", params={"mode": "M"}, headers=auth1).json()
    r = client.post(
        "/api/annotations",
        json={"assignment_id": a["assignment_id"], "line": "Salim/SOT keldi/SFL"},
        headers=auth2,
    )
    assert r.status_code == 409


def test_export_reimports_cleanly(client):
    auth = register_and_login(client)
    ingest(client, auth, "Salim keldi. Anvar ketdi.")
    for line in ("Salim/SOT keldi/SFL.", "Anvar/SOT ketdi/SFL."):
        a = client.get("/api/assignments/next", params={"mode": "M"}, headers=auth).json()
        r = client.post(
            "/api/annotations",
            json={"assignment_id": a["assignment_id"], "line": line},
            headers=auth,
        )
        ann_id = r.json()["annotation_id"]
        client.post(f"/api/annotations/{ann_id}/confirm", headers=auth)
    txt = client.get("/api/export", params={"format": "txt"}, headers=auth).text
    xml = client.get("/api/export", params={"format": "xml"}, headers=auth).text
    assert len(corpus_io.import_txt(txt)) == 2
    assert len(corpus_io.import_xml(xml)) == 2


def test_stats_word_count(client):
    auth = register_and_login(client)
    ingest(client, auth, "Salim keldi. Anvar eshik yoniga ketdi.")
    s = client.get("/api/stats", headers=auth).json()
    assert s["sentences"] == 2
    assert s["words"] == 6  # punctuation tokens excluded
    assert s["categories"]["literature"]["sentences"] == 2


def test_concurrent_next_assignment_no_duplicates(store, seed_registry):
    app = create_app(store, seed_registry)
    with TestClient(app) as client:
        auths = [register_and_login(client, f"expert{i}") for i in range(32)]
        body = ". ".join(f"Gap{chr(ord('A') + i)} keldi" for i in range(20)) + "."
        ingest(client, auths[0], body)

        def grab(auth):
            r = client.get("/api/assignments/next", params={"mode": "M"}, headers=auth)
            return r.json()["sentence_id"] if r.status_code == 200 else None

        with concurrent.futures.ThreadPoolExecutor(max_workers=32) as pool:
            got = list(pool.map(grab, auths))
        granted = [g for g in got if g is not None]
        assert len(granted) == len(set(granted)) == 20
        store.check_invariants()
