import io
import json
from types import SimpleNamespace

import pytest

from posgame.adversaries import Scripted
from posgame.cli import (
    EchoReferee,
    ParseError,
    check_input,
    cmd_play,
    interactive,
    main,
    parse_edge_list,
    parse_parts,
    summarize,
)
from posgame.board import Board, Owner
from posgame.engine import GameSpec, Transcript, build, replay
from posgame.gk import generate_sparse_member
from posgame.graphs import SimpleGraph


def write_graph(path, g):
    lines = [str(g.n)] + [f"{u} {v}" for u, v in g.edges]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def every_edge(n):
    return "".join(f"{u} {v}\n" for u in range(n) for v in range(u + 1, n))


class TestSimulate:
    def test_summary_and_bound(self, capsys):
        assert main(["simulate", "--variant", "weak-mindeg", "--n", "49", "--m", "2", "--reps", "3"]) == 0
        out = capsys.readouterr().out
        assert "runs over bound" in out
        rows = dict(line.split("  ", 1) for line in out.splitlines()[1:])
        assert rows["bound"].strip() == "25"
        assert rows["runs"].strip() == "3"

    def test_kconn_transcripts_and_summary(self, tmp_path, capsys):
        code = main(["simulate", "--variant", "weak-kconn", "--k", "3", "--n", "60", "--reps", "3",
                     "--adversary", "cut", "--out", str(tmp_path), "--strict"])
        assert code == 0
        files = sorted(tmp_path.glob("*.json"))
        assert len(files) == 3
        data = [json.loads(f.read_text()) for f in files]
        s = summarize(data)
        assert s["wins"] == 3 and s["moves_max"] <= 91
        assert f"{s['moves_min']} / {s['moves_mean']} / {s['moves_max']}" in capsys.readouterr().out
        for d in data:
            t = Transcript.from_json(d)
            assert replay(t).result_hash() == t.result_hash()

    def test_unknown_flag(self):
        with pytest.raises(SystemExit) as e:
            main(["simulate", "--variant", "weak-mindeg", "--n", "10", "--foo"])
        assert e.value.code == 2

    def test_bad_override_is_usage_error(self, capsys):
        code = main(["simulate", "--variant", "weak-kconn", "--k", "3", "--n", "60", "--set", "nonsense=1"])
        assert code == 2
        assert capsys.readouterr().err.startswith("error:")

    def test_summarize_empty(self):
        assert summarize([]) == {"runs": 0}


class TestVerifyGk:
    def test_sparse_member(self, tmp_path, capsys):
        g, _ = generate_sparse_member(12, 3)
        assert main(["verify-gk", write_graph(tmp_path / "g.txt", g), "--k", "3"]) == 0
        out = capsys.readouterr().out
        assert "vertex connectivity 3 (>= k = 3)" in out
        assert "FAIL" not in out

    def test_complete_graph(self, tmp_path):
        assert main(["verify-gk", write_graph(tmp_path / "k15.txt", SimpleGraph.complete(15)), "--k", "3"]) == 0

    def test_wrong_cycle_order(self, tmp_path, capsys):
        g, _ = generate_sparse_member(12, 3)
        path = write_graph(tmp_path / "g.txt", g)
        code = main(["verify-gk", path, "--k", "3", "--parts", "0 2 1 3 4 5; 6 7 8 9 10 11"])
        assert code == 1
        assert "(iii) FAIL" in capsys.readouterr().out

    def test_json_output(self, tmp_path, capsys):
        g, _ = generate_sparse_member(12, 3)
        main(["verify-gk", write_graph(tmp_path / "g.txt", g), "--k", "3", "--json"])
        last = capsys.readouterr().out.strip().splitlines()[-1]
        assert json.loads(last)["connectivity"] == 3

    def test_duplicate_edge(self, tmp_path, capsys):
        p = tmp_path / "bad.txt"
        p.write_text("4\n0 1\n1 0\n")
        assert main(["verify-gk", str(p), "--k", "3"]) == 2
        assert "line 3: duplicate edge" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["verify-gk", str(tmp_path / "nope.txt"), "--k", "3"]) == 2


class TestParsing:
    def test_comments_and_blank_lines(self):
        g = parse_edge_list("# a triangle\n3\n\n0 1\n1 2\n# done\n0 2\n")
        assert g.edge_count() == 3

    @pytest.mark.parametrize("text,msg", [
        ("", "empty"),
        ("x\n", "vertex count"),
        ("3\n0 1 2\n", "expected 'u v'"),
        ("3\n0 a\n", "non-integer"),
        ("3\n0 3\n", "out of range"),
        ("3\n1 1\n", "self-loop"),
    ])
    def test_bad_edge_lists(self, text, msg):
        with pytest.raises(ParseError, match=msg):
            parse_edge_list(text)

    def test_default_parts(self):
        assert [len(p) for p in parse_parts(None, 12, 3).parts] == [6, 6]

    def test_parts_must_cover(self):
        with pytest.raises(ParseError):
            parse_parts("0 1 2; 3 4", 6, 3)


class TestSolve:
    def test_conn_k4(self, capsys):
        assert main(["solve", "--game", "conn", "--n", "4"]) == 0
        assert "Maker wins; optimal number of moves: 3" in capsys.readouterr().out

    def test_too_large(self, capsys):
        assert main(["solve", "--game", "conn", "--n", "8"]) == 2
        assert capsys.readouterr().err.startswith("error:")


class TestPlay:
    def test_session_replays_like_a_script(self):
        spec = GameSpec("weak-mindeg", 8)
        out = io.StringIO()
        t = interactive(spec, io.StringIO(every_edge(8)), out)
        assert t.winner == "M"
        assert t.header["params"]["adversary"] == "scripted"
        assert replay(Transcript.from_json(json.loads(t.dumps()))).result_hash() == t.result_hash()

        # the engine's own echo of the same Breaker moves matches the session line for line
        echo = io.StringIO()
        EchoReferee(spec, build(spec), Scripted(t.header["params"]["script"]), out=echo).run()
        shown = [ln for ln in out.getvalue().replace("your edge (u v, q to quit)> ", "").splitlines()
                 if not ln.startswith("rejected:")]
        assert shown == echo.getvalue().splitlines()

    def test_rejections_and_quit(self, tmp_path):
        args = SimpleNamespace(variant="weak-mindeg", n=8, k=1, m=1, seed=0, maker="default", profile=None,
                               set=None, d=80, eps=0.1, move_cap=None, out=str(tmp_path / "s.json"))
        out = io.StringIO()
        assert cmd_play(args, io.StringIO("0 0\nfoo\n0 1\n0 1\nq\n"), out) == 0
        text = out.getvalue()
        assert "rejected: self-loops are not edges" in text
        assert "rejected: enter two vertex numbers" in text
        assert "rejected: edge 0 1 is already claimed by you" in text
        saved = json.loads((tmp_path / "s.json").read_text())
        assert saved["result"]["outcome"] == "forfeit"
        assert saved["result"]["forfeit"]["player"] == "B"
        assert saved["header"]["params"]["script"] == [[0, 1]]

    def test_check_input(self):
        b = Board(6)
        b.claim(Owner.ONE, 2, 3)
        assert check_input("3 2", b)[0] == "edge 3 2 is already claimed by the strategy"
        assert check_input("0 9", b)[0].startswith("vertices must lie")
        assert check_input("5, 1", b) == (None, (1, 5))
        allowed = [0] * 6
        assert check_input("0 1", b, allowed)[0] == "edge 0 1 is not on this board"
