import json

import pytest

from teaindex.cli import main

from conftest import BRAIN_CT, GOLDEN_KEYWORDS, MESH_EXCERPT, MINI_THESAURUS


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def golden_index_file(tmp_path, capsys):
    path = tmp_path / "index.json"
    code, _, _ = run(capsys, "index", BRAIN_CT, "--thesaurus", MINI_THESAURUS, "-o", path)
    assert code == 0
    return path


def test_index_golden(tmp_path, capsys):
    out_path = tmp_path / "index.json"
    code, out, _ = run(capsys, "index", BRAIN_CT, "--thesaurus", MINI_THESAURUS, "-o", out_path)
    assert code == 0
    assert out.startswith("Image brain-ct (brain CT, patient upload)\nIndex Keywords : ")
    data = json.loads(out_path.read_text(encoding="utf-8"))
    assert {e["keyword"] for e in data["per_image"]["brain-ct"]} == GOLDEN_KEYWORDS
    for kw in ("Hématome fronto pariétale", "Hémorragie méningée", "Inondation ventriculaire"):
        assert kw in out


def test_index_without_thesaurus(tmp_path, capsys):
    code, _, err = run(capsys, "index", BRAIN_CT, "-o", tmp_path / "i.json")
    assert code == 1
    assert "thesaurus" in err and "--help" in err
    assert not (tmp_path / "i.json").exists()


def test_index_bad_manifest(tmp_path, capsys):
    missing = tmp_path / "missing.json"
    code, _, err = run(capsys, "index", missing, "--thesaurus", MINI_THESAURUS)
    assert code == 1 and str(missing) in err


def test_index_stopword_only_corpus_is_runtime_error(tmp_path, capsys):
    manifest = tmp_path / "m.json"
    manifest.write_text(json.dumps({
        "images": [{"image_id": "x"}],
        "annotations": [{"annotation_id": "a", "image_id": "x", "text": "il est dans la"}],
    }), encoding="utf-8")
    code, _, err = run(capsys, "index", manifest, "--thesaurus", MINI_THESAURUS,
                       "-o", tmp_path / "i.json")
    assert code == 2 and "no content tokens" in err


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"thesaurus_path": str(MINI_THESAURUS), "tfidf_threshold": 1.0}),
                   encoding="utf-8")
    out = tmp_path / "i.json"
    code, text, _ = run(capsys, "index", BRAIN_CT, "--config", cfg, "-o", out)
    assert code == 0 and "(none)" in text
    code, text, _ = run(capsys, "index", BRAIN_CT, "--config", cfg, "--tfidf-threshold", "0.125",
                        "-o", out)
    assert code == 0 and "Hémorragie méningée" in text


def test_config_from_environment(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"thesaurus_path": str(MINI_THESAURUS)}), encoding="utf-8")
    monkeypatch.setenv("TEAINDEX_CONFIG", str(cfg))
    code, text, _ = run(capsys, "index", BRAIN_CT, "-o", tmp_path / "i.json")
    assert code == 0 and "Inondation ventriculaire" in text


def test_bad_config_value(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"window": 0}), encoding="utf-8")
    code, _, err = run(capsys, "terms", BRAIN_CT, "--config", cfg)
    assert code == 1 and "window" in err


def test_terms_csv(tmp_path, capsys):
    code, out, _ = run(capsys, "terms", BRAIN_CT)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "term,surface_form,n_i,avg_score,selected"
    assert "compound,length,mi_score,support" in lines
    assert any(l.startswith("hémorragie méningée,2,") for l in lines)


def test_terms_out_dir(tmp_path, capsys):
    code, out, _ = run(capsys, "terms", BRAIN_CT, "--out-dir", tmp_path / "rep")
    assert code == 0 and out == ""
    assert (tmp_path / "rep" / "terms.csv").read_text(encoding="utf-8").startswith("term,")
    assert (tmp_path / "rep" / "compounds.csv").read_text(encoding="utf-8").startswith("compound,")


def test_terms_json_threshold_one(capsys):
    code, out, _ = run(capsys, "terms", BRAIN_CT, "--format", "json", "--tfidf-threshold", "1.0")
    assert code == 0
    data = json.loads(out)
    assert data["simple_terms"] and not any(r["selected"] for r in data["simple_terms"])
    assert data["compound_terms"] == []


def test_search(golden_index_file, capsys):
    code, out, _ = run(capsys, "search", golden_index_file, "hémorragie", "--format", "json")
    assert code == 0
    hits = json.loads(out)
    assert hits[0]["image_id"] == "brain-ct" and "hémorragie méningée" in hits[0]["keywords"]
    code, out, _ = run(capsys, "search", golden_index_file, "les", "des")
    assert code == 0 and out == ""


def test_search_stale_warning(golden_index_file, tmp_path, capsys):
    manifest = tmp_path / "m.json"
    manifest.write_text(json.dumps({
        "images": [{"image_id": "x"}],
        "annotations": [{"annotation_id": "a", "image_id": "x", "text": "autre chose"}],
    }), encoding="utf-8")
    code, _, err = run(capsys, "search", golden_index_file, "hématome", "--manifest", manifest)
    assert code == 0 and "stale" in err
    code, _, err = run(capsys, "search", golden_index_file, "hématome", "--manifest", BRAIN_CT)
    assert code == 0 and err == ""


def test_search_corrupt_index(golden_index_file, capsys):
    golden_index_file.write_text("{", encoding="utf-8")
    code, _, err = run(capsys, "search", golden_index_file, "x")
    assert code == 2 and "corrupt" in err


def test_eval_perfect_run(tmp_path, capsys):
    (tmp_path / "run").write_text("q1 a 1 2\nq1 b 2 1\n", encoding="utf-8")
    (tmp_path / "qrels").write_text("q1 a 1\n", encoding="utf-8")
    code, out, _ = run(capsys, "eval", tmp_path / "run", tmp_path / "qrels",
                       "--curve", tmp_path / "pr.csv")
    assert code == 0 and out.strip() == "MAP 1.0000"
    assert (tmp_path / "pr.csv").read_text(encoding="utf-8").startswith("query_id,recall,precision")


def test_stem(capsys):
    assert run(capsys, "stem", "caresses", "--lang", "en") == (0, "caress\n", "")
    assert run(capsys, "stem", "méningée", "pariétales")[1] == "méning\npariétal\n"


def test_thesaurus_check(capsys):
    code, out, _ = run(capsys, "thesaurus-check", MESH_EXCERPT)
    assert code == 0
    assert out.splitlines()[0] == "2 concepts"
    assert "warning" in out


def test_thesaurus_check_malformed(tmp_path, capsys):
    bad = tmp_path / "bad.rdf"
    bad.write_text("<rdf:RDF", encoding="utf-8")
    code, _, err = run(capsys, "thesaurus-check", bad)
    assert code == 1 and "bad.rdf" in err


@pytest.mark.parametrize("command", ["index", "terms", "search", "eval", "stem", "thesaurus-check"])
def test_help(command, capsys):
    with pytest.raises(SystemExit) as exc:
        main([command, "--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    if command in ("index", "terms"):
        assert "0.125" in out and "0.15" in out


def test_unknown_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["terms", str(BRAIN_CT), "--bogus"])
    assert exc.value.code == 1


def test_jobs_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "index", BRAIN_CT, "--thesaurus", MINI_THESAURUS, "--jobs", "1", "-o", a)
    run(capsys, "index", BRAIN_CT, "--thesaurus", MINI_THESAURUS, "--jobs", "4", "-o", b)
    assert a.read_bytes() == b.read_bytes()
