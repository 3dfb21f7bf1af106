import pytest
from fastapi.testclient import TestClient

from qslab import families as fam
from qslab.service import create_app
from qslab.structures import structure_to_json


@pytest.fixture()
def client():
    return TestClient(create_app())


def test_library_lists_all_families(client):
    boards = client.get("/library").json()["boards"]
    specs = " ".join(b["a"] for b in boards)
    for family in fam.FAMILIES:
        assert f"{family}:" in specs
    assert all("a_structure" in b for b in boards)


def test_solve_endpoint(client):
    a = structure_to_json(fam.build_prefix_structure("E", 1, "A"))
    b = structure_to_json(fam.build_prefix_structure("E", 1, "B"))
    r = client.post("/solve", json={"forest": "(E)", "a": a, "b": b})
    assert r.status_code == 200
    assert r.json()["winner"] == "spoiler"
    r = client.post("/solve", json={"forest": "(E", "a": a, "b": b})
    assert r.status_code == 400


def test_solve_budget_maps_to_422(client):
    a = structure_to_json(fam.build_prefix_structure("EE", 1, "A"))
    b = structure_to_json(fam.build_prefix_structure("EE", 1, "B"))
    r = client.post("/solve", json={"forest": "(E (E) (E))", "a": a, "b": b, "budget": 2})
    assert r.status_code == 422


def test_embed_endpoint(client):
    r = client.post("/embed", json={"s1": "(E (A) (E))", "s2": "(E (E)) (E (A))"})
    assert r.status_code == 200 and r.json()["present"] is False


def test_distinguish_endpoint(client):
    a = structure_to_json(fam.build_prefix_structure("E", 1, "A"))
    b = structure_to_json(fam.build_prefix_structure("E", 1, "B"))
    r = client.post("/distinguish", json={"forest": "(E)", "a": a, "b": b})
    assert r.status_code == 200 and r.json()["formula"].startswith("(exists")


def test_session_flow(client):
    r = client.post("/sessions", json={"library": "marked-leaf-board", "human_side": "spoiler"})
    assert r.status_code == 201
    doc = r.json()
    sid = doc["id"]
    assert doc["phase"] == "choose-tree"
    assert {"type": "choose-tree", "tree": 0} in doc["legal_moves"]

    r = client.post(f"/sessions/{sid}/move", json={"type": "choose-tree", "tree": 0})
    assert r.status_code == 200 and r.json()["phase"] == "spoiler-pick"

    # the marked leaf is the last element of the A structure
    a = doc["a"]
    black = a["relations"]["U"][0][0]
    r = client.post(f"/sessions/{sid}/move", json={"type": "pick", "element": black})
    assert r.json()["phase"] == "duplicator-pick"

    r = client.post(f"/sessions/{sid}/engine-move")
    body = r.json()
    assert body["phase"] == "done" and body["winner"] == "spoiler"
    assert body["loss_reason"]

    r = client.post(f"/sessions/{sid}/undo")
    assert r.json()["phase"] == "duplicator-pick"

    r = client.post(f"/sessions/{sid}/move", json={"type": "pick", "element": 99})
    assert r.status_code == 409

    r = client.get("/sessions/does-not-exist")
    assert r.status_code == 404


def test_session_requires_board(client):
    r = client.post("/sessions", json={"human_side": "spoiler"})
    assert r.status_code == 400
