"""Smoke tests for the python bindings: one pass over the main operations."""

import pytest

import decoyvault as dv

OWNER = {
    "mac": "aa:bb:cc:dd:ee:ff",
    "ip": "192.168.1.2",
    "hostname": "host1",
    "user_id": "alice",
}

GRANTEE = {
    "mac": "02:03:04:05:06:07",
    "ip": "10.1.2.3",
    "hostname": "guesthost",
    "user_id": "bob",
}

CONTENT = b"SSN: 123-45-6789 card 4111-1111-1111-1111\n"


@pytest.fixture()
def vault(tmp_path):
    return dv.Vault.init(str(tmp_path / "vault"))


def test_digit_cipher_roundtrip():
    key = dv.random_key_hex()
    cipher = dv.encrypt_digits(key, "obj", 1, 0, "123456789")
    assert len(cipher) == 9
    assert cipher.isdigit()
    assert dv.decrypt_digits(key, "obj", 1, 0, cipher) == "123456789"


def test_scan_and_decoy():
    runs = dv.scan(CONTENT)
    assert [r["digits"] for r in runs] == ["123", "45", "6789", "4111", "1111", "1111", "1111"]
    assert dv.is_sensitive_token("123-45-6789")
    assert not dv.is_sensitive_token("A1B2")

    key = dv.random_key_hex()
    decoy = dv.generate_decoy(CONTENT, key, "obj", 1)
    assert len(decoy) == len(CONTENT)
    assert decoy != CONTENT
    assert decoy.startswith(b"SSN: ")

    assert dv.derive_decoy_name("report.docx", 1) == "report_final.docx"


def test_policy_table():
    assert dv.required_identifiers(5) == ["mac"]
    assert dv.required_identifiers(1) == ["mac", "ip", "hostname", "user_id", "quad_hash"]
    assert [dv.decoy_count(level) for level in (5, 4, 3, 2, 1)] == [1, 2, 3, 4, 5]
    with pytest.raises(dv.PolicyError):
        dv.required_identifiers(0)


def test_vault_flow(vault):
    assert vault.get_level() == 5

    record = vault.upload("doc.txt", CONTENT, OWNER)
    object_id = record["object_id"]
    assert len(record["decoys"]) == 1
    assert record["sensitive_run_count"] == 7

    content, name, verdict = vault.download(object_id, OWNER)
    assert verdict["outcome"] == "original_served"
    assert content == CONTENT
    assert name == "doc.txt"

    intruder = dict(OWNER, mac="00:11:22:33:44:55")
    content, name, verdict = vault.download(object_id, intruder)
    assert verdict["outcome"] == "decoy_served"
    assert len(content) == len(CONTENT)
    assert content != CONTENT
    assert name == "doc.txt"

    with pytest.raises(dv.NotFoundError):
        vault.download("no-such-object", OWNER)


def test_share_flow(vault):
    record = vault.upload("doc.txt", CONTENT, OWNER)
    token = vault.create_share(record["object_id"], GRANTEE, OWNER)

    content, _, verdict = vault.redeem_share(token, GRANTEE)
    assert verdict["outcome"] == "original_served"
    assert content == CONTENT

    content, _, verdict = vault.redeem_share(token, OWNER)
    assert verdict["outcome"] == "decoy_served"
    assert len(content) == len(CONTENT)


def test_levels_and_audit(vault):
    record = vault.upload("doc.txt", CONTENT, OWNER)
    assert vault.set_level(2, "drill")
    assert vault.get_level() == 2

    # At level 2 a single wrong field denies the original.
    partial = dict(OWNER, user_id="mallory")
    _, _, verdict = vault.download(record["object_id"], partial)
    assert verdict["outcome"] == "decoy_served"

    downloads = vault.audit(kind="download")
    assert len(downloads) == 1
    assert downloads[0]["outcome"] == "decoy_served"
    seqs = [event["seq"] for event in vault.audit()]
    assert seqs == sorted(seqs)

    report = vault.verify()
    assert report["clean"]
    assert report["records_checked"] == 1


def test_host_identity_helpers():
    quad = dv.compute_quad_hash("aa:bb:cc:dd:ee:ff", "192.168.1.2", "host1", "alice")
    assert quad == "2399bfce638ef8a763fe2d2067cba49f761fb0c2e869b298518e867382a596f3"
    identity = dv.collect_host_identity()
    assert set(identity) == {"mac", "ip", "hostname", "user_id", "quad_hash"}
