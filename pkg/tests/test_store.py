import threading
from fractions import Fraction

from hklab.colength import ColengthRecord, IdealSpec, frobenius_power, colength
from hklab.graded import parse_ring_spec
from hklab.store import ResultStore, cached_colength


def sample_record(total=27, q=3):
    return ColengthRecord(
        p=3,
        n=1,
        q=q,
        dims=(1, 3, 6, 7, 6, 3, 1, 0),
        total=total,
        normalized=Fraction(total, q * q),
    )


def test_round_trip(tmp_path):
    store = ResultStore(tmp_path)
    key = ResultStore.key(3, 1, "ring", "ideal", "v1")
    store.put(key, sample_record())
    assert store.get(key) == sample_record()


def test_get_on_empty_store(tmp_path):
    store = ResultStore(tmp_path / "never_created")
    assert store.get(ResultStore.key(3, 1, "r", "i", "v")) is None


def test_corrupt_entry_treated_as_absent(tmp_path, caplog):
    store = ResultStore(tmp_path)
    key = ResultStore.key(3, 1, "r", "i", "v")
    store.put(key, sample_record())
    (tmp_path / f"{key}.json").write_text("{not json", encoding="utf-8")
    with caplog.at_level("WARNING"):
        assert store.get(key) is None
    assert "corrupt" in caplog.text


def test_key_sensitivity():
    base = ResultStore.key(3, 1, "ring", "ideal", "v1")
    assert ResultStore.key(3, 2, "ring", "ideal", "v1") != base
    assert ResultStore.key(3, 1, "ring", "ideal", "v2") != base
    assert ResultStore.key(3, 1, "ring", "other", "v1") != base
    assert ResultStore.key(3, 1, "ring", "ideal", "v1") == base


def test_concurrent_writers_leave_valid_entry(tmp_path):
    store = ResultStore(tmp_path)
    key = ResultStore.key(5, 1, "r", "i", "v")
    records = [sample_record(total=100 + i) for i in range(8)]
    barrier = threading.Barrier(len(records))

    def writer(rec):
        barrier.wait()
        store.put(key, rec)

    threads = [threading.Thread(target=writer, args=(r,)) for r in records]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    winner = store.get(key)
    assert winner in records
    # no stray temp files survive
    assert list(tmp_path.glob("*.tmp")) == []


def test_cached_colength_computes_and_stores(tmp_path):
    store = ResultStore(tmp_path)
    ring = parse_ring_spec("fermat:s=3,d=4,p=3")
    ideal = IdealSpec.maximal_ideal(ring)
    rec = cached_colength(store, ring, ideal, 3, 1)
    assert rec.total == 27
    key = ResultStore.key(
        3, 1, ring.canonical_string(), ideal.canonical_string(), "0.1.0"
    )
    assert store.get(key) == rec


def test_cached_colength_reads_planted_entry(tmp_path):
    # a pre-seeded entry under the right key is trusted verbatim
    store = ResultStore(tmp_path)
    ring = parse_ring_spec("fermat:s=3,d=4,p=3")
    ideal = IdealSpec.maximal_ideal(ring)
    planted = sample_record(total=999)
    key = ResultStore.key(
        3, 1, ring.canonical_string(), ideal.canonical_string(), "0.1.0"
    )
    store.put(key, planted)
    assert cached_colength(store, ring, ideal, 3, 1) == planted


def test_cached_colength_without_store():
    ring = parse_ring_spec("fermat:s=3,d=4,p=3")
    ideal = IdealSpec.maximal_ideal(ring)
    direct = colength(ring, frobenius_power(ring, ideal, 3), q=3, n=1)
    assert cached_colength(None, ring, ideal, 3, 1) == direct


def test_generator_order_shares_cache():
    ring = parse_ring_spec("fermat:s=3,d=4,p=3")
    a = IdealSpec.maximal_ideal(ring)
    b = IdealSpec.from_polynomials(tuple(reversed(a.generators)))
    key_a = ResultStore.key(3, 1, ring.canonical_string(), a.canonical_string(), "v")
    key_b = ResultStore.key(3, 1, ring.canonical_string(), b.canonical_string(), "v")
    assert key_a == key_b
