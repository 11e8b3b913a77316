import io
import json
import logging

import numpy as np
import pytest

from kuznetsov.io.report import CheckRecord, RecordWriter, encode, timed_check


class TestEncode:
    @pytest.mark.parametrize(
        "value, expected",
        [
            (1 + 2j, [1.0, 2.0]),
            (np.float64(0.5), 0.5),
            (np.int64(3), 3),
            (np.bool_(True), True),
            (np.array([1j, 2.0]), [[0.0, 1.0], [2.0, 0.0]]),
            ({"nu": 0.3j, 2: (1, 2)}, {"nu": [0.0, 0.3], "2": [1, 2]}),
            (float("inf"), "inf"),
            (None, None),
        ],
    )
    def test_values(self, value, expected):
        assert encode(value) == expected

    def test_unwraps_value_attribute(self):
        class Result:
            value = 2.5

        assert encode(Result()) == 2.5


class TestCheckRecord:
    def test_pass_without_residual(self):
        assert CheckRecord("kloosterman", {"m": 1}, -1.0).passed

    @pytest.mark.parametrize("residual, passed", [(1e-12, True), (1e-10, True), (1e-8, False)])
    def test_pass_against_tolerance(self, residual, passed):
        assert CheckRecord("x", residual=residual, tol=1e-10).passed is passed

    def test_to_dict(self):
        d = CheckRecord("gamma-p", {"s": 0.5 + 1j}, 1j, residual=1e-12, tol=1e-10).to_dict()
        assert d == {
            "check": "gamma-p",
            "inputs": {"s": [0.5, 1.0]},
            "value": [0.0, 1.0],
            "residual": 1e-12,
            "tol": 1e-10,
            "pass": True,
        }


class TestRecordWriter:
    def test_records_format(self):
        stream = io.StringIO()
        with RecordWriter("records", stream=stream) as writer:
            writer.write(CheckRecord("a", {"m": 1}, 2.0))
            writer.write(CheckRecord("b", residual=1.0, tol=0.1))
        lines = stream.getvalue().splitlines()
        assert [json.loads(line)["check"] for line in lines] == ["a", "b"]
        assert lines[0] == '{"check": "a", "inputs": {"m": 1}, "pass": true, "residual": null, "tol": null, "value": 2.0}'
        assert writer.count == 2
        assert writer.failures == 1

    def test_human_format(self):
        stream = io.StringIO()
        with RecordWriter("human", stream=stream) as writer:
            writer.write_all([CheckRecord("gram_deviation", {"pmax": 3}, 0.1, residual=1e-3, tol=1e-6)])
        line = stream.getvalue()
        assert line.startswith("gram_deviation")
        assert "pmax=3" in line
        assert "FAIL" in line

    def test_writes_file(self, tmp_path):
        path = tmp_path / "report.jsonl"
        with RecordWriter("records", str(path)) as writer:
            writer.write(CheckRecord("a"))
        assert writer.stream is None
        assert json.loads(path.read_text())["pass"] is True

    def test_rejects_format(self):
        with pytest.raises(ValueError):
            RecordWriter("yaml")


class TestTimedCheck:
    def test_returns_result(self):
        @timed_check
        def square(x):
            return x * x

        assert square(3) == 9
        assert square.__name__ == "square"

    def test_method(self):
        class Runner:
            name = "runner"

            @timed_check
            def run(self, value):
                return [value]

        assert Runner().run(4) == [4]

    def test_propagates_errors(self):
        @timed_check
        def broken():
            raise RuntimeError("boom")

        with pytest.raises(RuntimeError):
            broken()
