"""One cheap invocation of every subcommand on a small shared window."""

import json

import pytest

import coarselab as cl
from coarselab.cli import main
from coarselab.serialization import (
    action_to_json,
    canonical_dumps,
    operator_to_json,
    partition_to_json,
)


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cli")
    z = cl.segment_space(-20, 20)
    ray = cl.segment_space(0, 20)
    assert main(["space", "gen", "--kind", "segment", "--lo", "-20", "--hi", "20",
                 "--out", str(tmp / "z.json")]) == 0
    assert main(["space", "gen", "--kind", "segment", "--lo", "0", "--hi", "20",
                 "--out", str(tmp / "ray.json")]) == 0
    (tmp / "neg.json").write_text(canonical_dumps(action_to_json(cl.negation_action(z))))
    (tmp / "t.json").write_text(canonical_dumps(action_to_json(cl.translation_action(z))))
    op = cl.BandOperator.from_entries(z, [(x, -x, 1.0) for x in z.points])
    (tmp / "op.json").write_text(canonical_dumps(operator_to_json(op)))
    diag = cl.BandOperator.from_entries(z, [(x, x, 0.5) for x in z.points])
    (tmp / "diag.json").write_text(canonical_dumps(operator_to_json(diag)))
    (tmp / "abs.json").write_text(json.dumps({"pairs": [[x, abs(x)] for x in z.points]}))
    (tmp / "id.json").write_text(json.dumps({"pairs": [[x, x] for x in z.points]}))
    (tmp / "hat.json").write_text(canonical_dumps(partition_to_json(cl.hat_partition(z, 5))))
    return tmp


CASES = [
    (0, ["space", "gen", "--kind", "axes", "--arms", "3", "--length", "5"]),
    (0, ["space", "gen", "--kind", "cone", "--levels", "0,1,2", "--weight", "linear",
         "--base-cycle", "5"]),
    (0, ["space", "gen", "--kind", "box", "--moduli", "2,4"]),
    (0, ["space", "validate", "--space", "z.json"]),
    (0, ["action", "validate", "--space", "z.json", "--action", "neg.json"]),
    (0, ["metric", "xg", "--space", "z.json", "--action", "neg.json"]),
    (0, ["metric", "xg", "--space", "z.json", "--action", "neg.json",
         "--mode", "general"]),
    (0, ["metric", "orbit", "--space", "z.json", "--action", "neg.json",
         "--kind", "min"]),
    (0, ["metric", "quotient", "--space", "ray.json", "--mod", "5"]),
    (0, ["metric", "tower", "--space", "z.json", "--families", "ball:1",
         "--depth", "3"]),
    (0, ["check", "discont", "--space", "z.json", "--action", "neg.json",
         "--g", "gamma", "--radii", "2,5"]),
    (0, ["check", "separation", "--space", "z.json", "--action", "neg.json",
         "--F", "e,gamma"]),
    (0, ["check", "one-ended", "--space", "ray.json", "--radii", "3"]),
    (1, ["check", "one-ended", "--space", "z.json", "--radii", "3"]),
    (0, ["check", "light", "--space", "z.json", "--codomain", "z.json",
         "--map", "id.json"]),
    (0, ["check", "weak-quotient", "--space", "z.json", "--codomain", "ray.json",
         "--map", "abs.json", "--radii", "3"]),
    (0, ["check", "identify", "--space", "z.json", "--action", "neg.json",
         "--map", "id.json", "--v", "ball:2", "--F", "e,gamma", "--u", "ball:2"]),
    (0, ["propa", "variation", "--space", "z.json", "--phi", "hat:5"]),
    (0, ["propa", "variation", "--space", "z.json", "--phi", "hat.json"]),
    (0, ["propa", "defect", "--space", "z.json", "--action", "t.json",
         "--E", "e,t,t*t", "--g", "t"]),
    (0, ["propa", "average", "--space", "z.json", "--action", "neg.json",
         "--phi", "hat:5", "--E", "e,gamma"]),
    (0, ["propa", "witness", "--space", "z.json", "--phi", "hat:5",
         "--epsilons", "0.9"]),
    (1, ["propa", "witness", "--space", "z.json", "--phi", "blocks:5",
         "--epsilons", "0.9"]),
    (0, ["roe", "propagation", "--space", "z.json", "--op", "op.json"]),
    (0, ["roe", "propagation", "--space", "z.json", "--op", "op.json",
         "--metric", "xg", "--action", "neg.json"]),
    (0, ["roe", "translate", "--space", "z.json", "--action", "neg.json",
         "--g", "gamma"]),
    (0, ["roe", "conjugate", "--space", "z.json", "--action", "neg.json",
         "--op", "op.json", "--g", "gamma"]),
    (0, ["roe", "decompose", "--space", "z.json", "--action", "neg.json",
         "--op", "op.json", "--R", "0", "--F", "e,gamma"]),
    (0, ["roe", "defect", "--space", "z.json", "--action", "neg.json",
         "--op", "op.json", "--R", "1", "--F", "e,gamma"]),
    (0, ["roe", "hom-check", "--space", "z.json", "--action", "neg.json",
         "--t", "op.json", "--s", "diag.json", "--g", "gamma", "--h", "gamma"]),
    (2, ["metric", "xg", "--space", "z.json", "--action", "t.json"]),
]

TEXT_CASE = ["check", "separation", "--space", "z.json", "--action", "neg.json",
             "--F", "e,gamma", "--format", "text"]


@pytest.mark.parametrize("expected,argv", CASES, ids=lambda c: str(c)[:48])
def test_subcommand(files, capsys, expected, argv):
    argv = [a if not a.endswith(".json") or "/" in a else str(files / a) for a in argv]
    rc = main(argv)
    out = capsys.readouterr().out
    assert rc == expected
    if rc != 2:
        report = json.loads(out)
        assert {"manifest", "value"} <= set(report)
        assert report["manifest"]["version"] == cl.__version__


def test_text_format_renders_aligned_report(files, capsys):
    argv = [a if not a.endswith(".json") else str(files / a) for a in TEXT_CASE]
    assert main(argv) == 0
    out = capsys.readouterr().out
    assert "manifest:" in out and "verdict:" in out
    assert "holds_on_window" in out
