import json
import sys
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from mdlattack.cfpm import mine_closed
from mdlattack.classify import BENIGN, MALWARE, ClassifierModel, classify, evaluate, train_classifier
from mdlattack.codetable import build_krimp, save_code_table, standard_code_table
from mdlattack.core import Dataset, LabeledDataset
from mdlattack.oracle import (BudgetExhausted, EmptyBenignPool, FixedOracle, HttpOracle, MDLOracle,
                              ProtocolError, SubprocessOracle, TransportError, build_benign_pool, evasion_rate,
                              make_oracle)
from mdlattack.pipeline import ModelParams

ECHO_CHILD = """
import sys
for line in sys.stdin:
    items = line.split()
    sys.stdout.write(("malware" if "9" in items else "benign") + "\\n")
    sys.stdout.flush()
"""

BAD_CHILD = """
import sys
for line in sys.stdin:
    sys.stdout.write("Benign\\n"); sys.stdout.flush()
"""


@pytest.fixture
def pool():
    return Dataset.from_iterables([{1, 2}, {9}, {1, 9}, {3}], alphabet=[1, 2, 3, 9])


def test_fixed_oracle(pool):
    o = FixedOracle(BENIGN)
    assert o.query((5,)) == BENIGN
    assert build_benign_pool(o, pool) == pool
    assert evasion_rate(o, pool) == 1.0
    assert o.query_count == 1 + 4 + 4
    assert evasion_rate(FixedOracle(MALWARE), pool) == 0.0
    with pytest.raises(EmptyBenignPool):
        build_benign_pool(FixedOracle(MALWARE), pool)


def test_budget(pool):
    o = FixedOracle(BENIGN, query_budget=3)
    with pytest.raises(BudgetExhausted):
        build_benign_pool(o, pool)
    assert o.query_count <= 3


def test_memoization_saves_queries():
    o = FixedOracle(BENIGN, memoize=True)
    o.query((1,))
    o.query((1,))
    assert o.query_count == 1


def _toy_model():
    benign = Dataset.from_iterables([{1, 2, 3}] * 6 + [{1, 2}, {4}], alphabet=range(1, 9))
    malware = Dataset.from_iterables([{6, 7, 8}] * 6 + [{7, 8}, {4, 5}], alphabet=range(1, 9))
    data = LabeledDataset(benign, malware)
    return train_classifier(data, ModelParams(minsup=1)), data


def test_builtin_oracle_matches_classifier():
    model, data = _toy_model()
    o = MDLOracle(model)
    samples = list(data.benign) + list(data.malware) + [(1, 7), (2, 6, 8), ()]
    assert [o.query(t) for t in samples] == [classify(model, t) for t in samples]


def test_builtin_benign_pool_matches_confusion_counts():
    model, data = _toy_model()
    pool = Dataset(data.benign.transactions + data.malware.transactions, data.alphabet)
    o = MDLOracle(model)
    d_b = build_benign_pool(o, pool)
    m = evaluate(model, data)
    assert d_b.n == m.tn + m.fn
    assert o.query_count == pool.n
    assert list(d_b) == [t for t in pool if classify(model, t) == BENIGN]


def test_subprocess_protocol(pool):
    with SubprocessOracle([sys.executable, "-c", ECHO_CHILD]) as o:
        assert [o.query(t) for t in pool] == [BENIGN, MALWARE, MALWARE, BENIGN]
        assert build_benign_pool(o, pool).transactions == ((1, 2), (3,))
        assert o.query_count == 8


def test_subprocess_protocol_error():
    with SubprocessOracle([sys.executable, "-c", BAD_CHILD]) as o:
        with pytest.raises(ProtocolError):
            o.query((1,))


def test_subprocess_transport_errors():
    with pytest.raises(TransportError):
        SubprocessOracle(["/nonexistent/oracle-binary"])
    with SubprocessOracle([sys.executable, "-c", "pass"]) as o:
        with pytest.raises(TransportError):
            o.query((1,))


def test_stub_oracle_module_serves_code_tables(tmp_path, example):
    ct_b = build_krimp(example, mine_closed(example, 1))
    ct_m = standard_code_table(Dataset.from_iterables([{5}] * 10 + [{1}, {2}, {3}, {4}]))
    save_code_table(ct_b, tmp_path / "b.ct")
    save_code_table(ct_m, tmp_path / "m.ct")
    model = ClassifierModel(ct_b, ct_m)
    cmd = [sys.executable, "-m", "mdlattack.stub_oracle", "--ct-benign", str(tmp_path / "b.ct"),
           "--ct-malware", str(tmp_path / "m.ct")]
    samples = [(1, 2, 4), (5,), (1, 4), (3, 5)]
    with SubprocessOracle(cmd) as o:
        assert [o.query(t) for t in samples] == [classify(model, t) for t in samples]


class _Handler(BaseHTTPRequestHandler):
    mode = "ok"
    seen_auth = []

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        _Handler.seen_auth.append(self.headers.get("Authorization"))
        if self.path != "/classify":
            self.send_response(404)
            self.end_headers()
            return
        if _Handler.mode == "bad":
            payload = {"label": "maybe"}
        else:
            payload = {"label": MALWARE if 9 in body["items"] else BENIGN}
        raw = json.dumps(payload).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(raw)))
        self.end_headers()
        self.wfile.write(raw)

    def log_message(self, *args):
        pass


@pytest.fixture
def http_url():
    srv = HTTPServer(("127.0.0.1", 0), _Handler)
    th = threading.Thread(target=srv.serve_forever, daemon=True)
    th.start()
    yield f"http://127.0.0.1:{srv.server_port}"
    srv.shutdown()
    srv.server_close()
    _Handler.mode = "ok"


def test_http_oracle(http_url, pool, monkeypatch):
    monkeypatch.setenv("MDLATTACK_ORACLE_TOKEN", "s3cret")
    o = HttpOracle(http_url + "/classify")
    assert [o.query(t) for t in pool] == [BENIGN, MALWARE, MALWARE, BENIGN]
    assert _Handler.seen_auth[-1] == "Bearer s3cret"


def test_http_concurrent_order_preserved(http_url, pool):
    o = HttpOracle(http_url + "/classify", max_in_flight=4)
    assert o.query_many(list(pool) * 5) == [BENIGN, MALWARE, MALWARE, BENIGN] * 5
    assert o.query_count == 20


def test_http_errors(http_url):
    with pytest.raises(ProtocolError):
        HttpOracle(http_url + "/other").query((1,))
    _Handler.mode = "bad"
    with pytest.raises(ProtocolError):
        HttpOracle(http_url + "/classify").query((1,))
    with pytest.raises(TransportError):
        HttpOracle("http://127.0.0.1:1/classify", timeout=2).query((1,))


def test_make_oracle(tmp_path, example):
    assert make_oracle("fixed", "malware").query(()) == MALWARE
    ct = build_krimp(example, mine_closed(example, 1))
    save_code_table(ct, tmp_path / "a.ct")
    o = make_oracle("builtin-mdl", f"{tmp_path / 'a.ct'},{tmp_path / 'a.ct'}")
    assert o.query((1, 4)) == MALWARE
    with pytest.raises(ValueError):
        make_oracle("telepathy")
    with pytest.raises(ValueError):
        make_oracle("builtin-mdl", "only-one.ct")
