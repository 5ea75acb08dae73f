"""The qgo command line, driven through main() with captured output."""

import json
from pathlib import Path

from qugo.cli import main

FIXTURES = Path(__file__).parent / "fixtures"
GAME1 = str(FIXTURES / "game1_6x6.qgr")
GAME2 = str(FIXTURES / "game2_19x19.qgr")


# -- replay --------------------------------------------------------------------


def test_replay_prints_the_final_diagram_and_status(capsys):
    assert main(["replay", GAME1]) == 0
    out = capsys.readouterr().out
    assert "status: finished after 30 moves" in out
    assert " 6  O O O . . O" in out
    assert "    A B C D E F" in out


def test_replay_verify_scores_the_game(capsys):
    assert main(["replay", GAME1, "--verify"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "B+4"


def test_replay_verify_reports_unfinished_games(capsys):
    assert main(["replay", GAME2, "--verify"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "unfinished"


def test_replay_diagrams_show_collapse_moves(capsys):
    assert main(["replay", GAME1, "--diagrams"]) == 0
    out = capsys.readouterr().out
    assert "move 3 (B):" in out                       # first induced collapse
    assert "move 2 (W):" not in out                   # still fully entangled
    assert "move 29 (B):" not in out                  # a pass collapses nothing


def test_replay_divergence_names_the_move(tmp_path, capsys):
    # a flipped marker early on sends the game elsewhere until a recorded
    # point is already taken
    bad = tmp_path / "bad.qgr"
    text = Path(GAME1).read_text().replace("B 1: D3* C2", "B 1: D3 C2*")
    bad.write_text(text)
    assert main(["replay", str(bad)]) == 1
    assert "divergence at move 10: occupied" in capsys.readouterr().err


def test_replay_divergence_on_a_forced_marker(tmp_path, capsys):
    # move 16's keep is forced; a record claiming the other half is lying
    bad = tmp_path / "bad.qgr"
    text = Path(GAME2).read_text().replace("W 16: P13* D18", "W 16: P13 D18*")
    bad.write_text(text)
    assert main(["replay", str(bad)]) == 1
    err = capsys.readouterr().err
    assert "move 16" in err and "kept marker" in err


def test_replay_reports_parse_errors(tmp_path, capsys):
    bad = tmp_path / "bad.qgr"
    bad.write_text("size=99\n")
    assert main(["replay", str(bad)]) == 1
    assert "bad-header" in capsys.readouterr().err


def test_replay_reports_missing_files(tmp_path, capsys):
    assert main(["replay", str(tmp_path / "nope.qgr")]) == 1
    assert "cannot read" in capsys.readouterr().err


# -- state ---------------------------------------------------------------------


def test_state_renders_a_mid_game_position(capsys):
    assert main(["state", GAME2, "--at", "10"]) == 0
    out = capsys.readouterr().out
    assert out.count("\n") == 20                      # 19 rows + letters
    assert "R16" not in out                           # diagrams, not lists


def test_state_quantum_prints_the_expression(capsys):
    assert main(["state", GAME2, "--at", "1", "--quantum"]) == 0
    out = capsys.readouterr().out.strip()
    assert out.startswith("(|0>_{")
    assert "(a1|0>_{K10}|1>_{R16} - b1|1>_{K10}|0>_{R16})_B" in out


# -- play ----------------------------------------------------------------------


def _play(tmp_path, name, *extra):
    out = tmp_path / name
    code = main(["play", "--size", "5", "--komi", "0", "--seat-black", "random",
                 "--seat-white", "random", "--seed", "cli-test",
                 "--max-moves", "40", "--out", str(out), *extra])
    return code, out


def test_play_between_random_seats_is_reproducible(tmp_path, capsys):
    code1, file1 = _play(tmp_path, "a.qgr")
    out1 = capsys.readouterr().out
    code2, file2 = _play(tmp_path, "b.qgr")
    out2 = capsys.readouterr().out
    assert code1 == code2 == 0
    assert file1.read_bytes() == file2.read_bytes()
    assert out1.splitlines()[0] == out2.splitlines()[0]


def test_played_records_replay_to_the_same_result(tmp_path, capsys):
    _play(tmp_path, "game.qgr")
    result = capsys.readouterr().out.splitlines()[0]
    assert main(["replay", str(tmp_path / "game.qgr"), "--verify"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == result


def test_play_supports_variants_and_handicap(tmp_path, capsys):
    out = tmp_path / "v.qgr"
    code = main(["play", "--size", "5", "--komi", "0", "--variant",
                 "semiquantum-white", "--seat-black", "random", "--seat-white",
                 "random", "--seed", "v", "--handicap", "C3", "--max-moves",
                 "30", "--out", str(out)])
    assert code == 0
    text = out.read_text()
    assert "variant=semiquantum-white" in text
    assert "handicap=C3" in text
    assert text.index("W 1:") < text.index("B 2:")    # handicap: white first
    capsys.readouterr()


# -- experiment ----------------------------------------------------------------


def test_experiment_csv_is_deterministic(tmp_path, capsys):
    config = tmp_path / "exp.json"
    config.write_text(json.dumps({
        "ruleset": "standard", "size": 5, "komi": 0, "games": 4,
        "seed": "exp-test"}))
    assert main(["experiment", "--config", str(config)]) == 0
    first = capsys.readouterr().out
    out_file = tmp_path / "exp.csv"
    assert main(["experiment", "--config", str(config),
                 "--out", str(out_file)]) == 0
    assert out_file.read_text() == first
    assert first.startswith("index,winner,margin,moves")


def test_experiment_rejects_bad_config(tmp_path, capsys):
    config = tmp_path / "exp.json"
    config.write_text(json.dumps({"games": 2, "nope": True}))
    assert main(["experiment", "--config", str(config)]) == 1
    assert "bad config" in capsys.readouterr().err
