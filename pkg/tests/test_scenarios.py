import json

import pytest

from catalog.builtin import named_group
from catalog.loader import load_fixture_pair, load_gamma, load_group, load_lattice_pair, load_model
from catalog.models import ElementModel, LatticePairModel, ScenarioModel, StratumModel
from catalog.scenarios import builtin_names, resolve_scenario
from core.errors import InputParseError
from core.flat_orbifold import CrystalGroup, SingularSetFixture
from core.orthogonal_action import SphereAction, StiefelAction


def write_json(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


# ==========================================
# 🏗️ Builtin scenarios
# ==========================================

def test_builtin_names():
    assert {"rsw27", "rsw29", "ssw", "mtriv", "lens", "flat-fixture", "torus5", "sunada15"} <= set(builtin_names())


def test_sphere_pair_scenario():
    sc = resolve_scenario("rsw29")
    assert sc.labels == ["O1", "O2"]
    assert all(isinstance(m, SphereAction) for _, m in sc.models)
    assert sc.cutoff_degree == 6
    assert sc.expected_value("first_disagreement(Z)").value == "4 (3 vs 6)"


def test_frame_space_scenario_defaults_to_z2():
    sc = resolve_scenario("rsw27")
    assert isinstance(sc.model(0), StiefelAction)
    assert sc.gamma == "Z^2"
    # frame spaces have no computed strata
    assert sc.strata_of(0) is None


def test_ssw_scenario_takes_the_golden_file():
    sc = resolve_scenario("ssw")
    assert sc.name == "ssw:3,1"
    assert sc.labels == ["O0", "O1"]
    assert sc.cutoff_degree == 4
    assert sc.expected_value("components(O1, Z)").value == "11"


def test_single_model_scenario_cannot_be_compared():
    sc = resolve_scenario("mtriv:D6")
    assert len(sc.models) == 1
    assert sc.gamma == "Z^2"
    assert sc.expected_value("components(F2)").value == "11"
    with pytest.raises(InputParseError):
        sc.pair()


def test_fixture_scenario():
    sc = resolve_scenario("flat-fixture:rsw35")
    assert sc.name == "rsw35"
    assert isinstance(sc.model(1), SingularSetFixture)
    assert [s.dimension for s in sc.strata_of(1)] == [0, 1]
    assert sc.gamma == "Z"


def test_torus5_scenario_records_provenance():
    sc = resolve_scenario("torus5")
    assert isinstance(sc.model(0), CrystalGroup)
    assert sc.cutoff_mu == "4"
    assert any("1729" in note for note in sc.notes)


def test_sunada15_scenario_has_strata():
    sc = resolve_scenario("sunada15")
    assert [s.dimension for s in sc.strata_of(0)] == [18]
    assert [s.dimension for s in sc.strata_of(1)] == [34]


def test_lens_scenario():
    sc = resolve_scenario("lens:5:1,2/1,3")
    assert len(sc.models) == 2
    assert sc.model(0).group.order == 5


@pytest.mark.parametrize("text", ["nothing", "mtriv", "lens:5", "ssw:3", "flat-fixture:", "mtriv:Q8"])
def test_bad_scenarios(text):
    with pytest.raises(InputParseError):
        resolve_scenario(text)


# ==========================================
# 📂 Scenario files
# ==========================================

def test_file_scenario_overrides_defaults(tmp_path):
    path = write_json(tmp_path / "mine.json", {
        "name": "mine", "target": "rsw29", "gamma": "Z^2", "cutoff_degree": 3,
        "expected": [{"quantity": "components(O1, Z^2)", "value": "?", "provenance": "TRIVIAL"}],
    })
    sc = resolve_scenario(path)
    assert sc.name == "mine"
    assert sc.gamma == "Z^2"
    assert sc.cutoff_degree == 3
    assert sc.expected[0].provenance == "TRIVIAL"


def test_self_referencing_scenario_is_rejected(tmp_path):
    path = tmp_path / "loop.json"
    write_json(path, {"name": "loop", "target": str(path)})
    with pytest.raises(InputParseError):
        resolve_scenario(str(path))


def test_scenario_files_need_a_target(tmp_path):
    path = write_json(tmp_path / "bad.json", {"name": "bad"})
    with pytest.raises(InputParseError):
        resolve_scenario(path)


# ==========================================
# 🧾 Loaders and schemas
# ==========================================

def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(InputParseError):
        load_model("no-such-file.json", ScenarioModel)
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    with pytest.raises(InputParseError):
        load_model(str(broken), ScenarioModel)


def test_presentation_file(tmp_path):
    path = write_json(tmp_path / "gamma.json", {"generators": 2, "relators": [[1, 1], [2, 2]], "label": "V"})
    gamma = load_gamma(f"file:{path}")
    assert gamma.generator_count == 2
    assert gamma.name == "V"
    bad = write_json(tmp_path / "bad.json", {"generators": 1, "relators": [[2]]})
    with pytest.raises(InputParseError):
        load_gamma(f"file:{bad}")


def test_empty_relator_is_rejected(tmp_path):
    path = write_json(tmp_path / "empty.json", {"generators": 1, "relators": [[]]})
    with pytest.raises(InputParseError, match="empty relator"):
        load_gamma(f"file:{path}")


def test_group_file(tmp_path):
    path = write_json(tmp_path / "group.json", {
        "name": "rot4",
        "generators": [{"matrix": [[0, -1], [1, 0]]}, {"diagonal": [1, -1]}],
    })
    group = load_group(path)
    assert group.order == 8
    assert group.name == "rot4"


def test_group_file_with_signed_and_cycle_forms(tmp_path):
    rotation = write_json(tmp_path / "rotation.json", {"name": "C4", "generators": [{"signed": [2, -1]}]})
    assert load_group(rotation).order == 4
    s3 = write_json(tmp_path / "s3.json", {
        "name": "S3",
        "generators": [{"cycles": "(1 2 3)", "n": 3}, {"cycles": "(1 2)", "n": 3}],
    })
    assert load_group(s3).order == 6


def test_non_isospectral_lattice_pair_is_rejected(tmp_path):
    path = write_json(tmp_path / "pair.json", {
        "name": "bad",
        "first": {"gram": [[1, 0], [0, 1]]},
        "second": {"gram": [[1, 0], [0, 2]]},
    })
    with pytest.raises(InputParseError):
        load_lattice_pair(path)


def test_fixture_pair_lengths():
    first, second, source = load_fixture_pair("rsw35")
    assert first.strata[0].isotropy == "Z_4"
    assert second.strata[0].absorb_cyclic
    assert source


def test_model_validation():
    with pytest.raises(ValueError):
        ElementModel(images=[1, 0], diagonal=[1, 1])
    with pytest.raises(ValueError):
        ElementModel(diagonal=[1, 2])
    with pytest.raises(ValueError):
        ElementModel(signed=[1, 1])
    with pytest.raises(ValueError):
        ElementModel(cycles="(1 2")
    with pytest.raises(ValueError):
        ElementModel(cycles="(1 2)")
    with pytest.raises(ValueError):
        StratumModel(dimension=1, count=1, isotropy="Z_2", length="-1")
    with pytest.raises(ValueError):
        LatticePairModel(name="x", first={"gram": [[1]]}, second={"gram": [[1]]}, extension_norm=0)
    with pytest.raises(ValueError):
        ScenarioModel(name="x", target="rsw29", colour="blue")


def test_named_groups():
    assert named_group("D8").order == 8
    assert named_group("Z5").order == 5
    assert named_group("H3").order == 27
    with pytest.raises(InputParseError):
        named_group("D7")
