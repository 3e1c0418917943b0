import csv
import json

from crawlsim.service import demo, recording
from crawlsim.service.cli import main


class TestSimulateCommand:
    def test_writes_trajectory_csv(self, tmp_path, capsys):
        out = tmp_path / "traj.csv"
        assert main(["simulate", "--duration", "20", "--phase", "1",
                     "--freq", "0.5", "--out", str(out)]) == 0
        with open(out) as fh:
            rows = list(csv.reader(fh))
        assert rows[0][0] == "t"
        assert len(rows) == 1002
        captured = capsys.readouterr().out
        assert "steady speed" in captured

    def test_valve_drive_option(self, tmp_path):
        out = tmp_path / "traj.csv"
        assert main(["simulate", "--duration", "10", "--freq", "1.0",
                     "--drive", "valve", "--out", str(out)]) == 0
        assert out.exists()


class TestCalibrateCommand:
    def test_writes_table(self, tmp_path, capsys):
        out = tmp_path / "cal.json"
        assert main(["calibrate", "--freqs", "0.5,1.0", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert [e["f_hz"] for e in doc["entries"]] == [0.5, 1.0]
        assert "m = " in capsys.readouterr().out


class TestExperimentCommand:
    def test_phase_sweep(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        assert main(["experiment", "phase-sweep", "--out", str(out)]) == 0
        assert out.exists()
        assert "phi = 0T/4" in capsys.readouterr().out

    def test_freq_sweep_reports_interior_max(self, tmp_path, capsys):
        out = tmp_path / "freq.csv"
        assert main(["experiment", "freq-sweep", "--out", str(out)]) == 0
        assert "interior maximum: yes" in capsys.readouterr().out

    def test_force_corr(self, tmp_path, capsys):
        out = tmp_path / "force.csv"
        assert main(["experiment", "force-corr", "--out", str(out)]) == 0
        assert "Pearson r" in capsys.readouterr().out


class TestReplayCommand:
    def test_verify_round_trip(self, tmp_path, capsys):
        record_path = tmp_path / "session.jsonl"
        config = demo.course_config()
        recording.record_session(config, demo.course_commands(config.tick_rate),
                                 record_path, duration_s=20.0)
        assert main(["replay", "--record", str(record_path), "--verify"]) == 0
        assert "hash match" in capsys.readouterr().out

    def test_replay_to_jsonl(self, tmp_path):
        record_path = tmp_path / "session.jsonl"
        out_path = tmp_path / "replayed.jsonl"
        config = demo.course_config()
        recording.record_session(config, {}, record_path, duration_s=5.0)
        assert main(["replay", "--record", str(record_path),
                     "--out", str(out_path)]) == 0
        lines = out_path.read_text().splitlines()
        assert len(lines) == 250
        assert json.loads(lines[0])["type"] == "snapshot"
