import json
import logging
from threading import Event

import pytest

from kuznetsov.app.runconfig import RunConfig
from kuznetsov.app.suite import SUITES, GroupSuite, KirillovSuite, KloostermanBasicSuite, LieSuite, Suite, _worst, get_suite, run_all
from kuznetsov.errors import QuadratureError
from kuznetsov.log import configure_logging


def make_config(target, **values):
    return RunConfig.from_mapping("verify", target, values)


class TestRegistry:
    def test_names(self):
        assert set(SUITES) == {"group", "lie", "jacquet", "kirillov", "mellin-pairs", "gram", "kloosterman-basic"}
        for name, cls in SUITES.items():
            assert issubclass(cls, Suite)
            assert cls.name == name

    def test_lookup(self):
        assert get_suite("group") is GroupSuite
        assert get_suite("spectral") is None

    def test_base_has_no_checks(self):
        with pytest.raises(NotImplementedError):
            Suite(make_config("group")).checks()


class TestWorst:
    def test_largest_residual(self):
        record = _worst("x", [1e-12, 3e-11, 2e-12], 1e-10, p=2)
        assert record.residual == 3e-11
        assert record.inputs == {"p": 2, "samples": 3}
        assert record.passed

    def test_empty(self):
        assert _worst("x", [], 1e-10).residual == 0.0


class TestGroupSuite:
    def test_passes(self):
        records = GroupSuite(make_config("group", seed="3")).run()
        assert [r.check for r in records] == ["iwasawa_roundtrip", "bruhat_roundtrip", "action_cocycle"]
        assert all(r.passed for r in records)

    def test_seeded(self):
        first = GroupSuite(make_config("group", seed="11")).run()
        second = GroupSuite(make_config("group", seed="11")).run()
        assert [r.residual for r in first] == [r.residual for r in second]


@pytest.mark.slow
class TestInvariantRecords:
    def test_lie_compares_both_derivative_routes(self):
        records = {r.check: r for r in LieSuite(make_config("lie")).run()}
        route = records["right_translation_route"]
        assert route.tol == 1e-6
        assert route.inputs["samples"] == 3 * 100
        assert route.passed

    def test_kirillov_applies_weyl_element_twice(self):
        records = {r.check: r for r in KirillovSuite(make_config("kirillov")).run()}
        twice = records["weyl_twice"]
        assert twice.tol == 1e-3
        assert twice.passed


class TestKloostermanNaive:
    @pytest.mark.parametrize("m, n, ell, expected", [(1, 1, 1, 1.0), (1, 1, 3, -1.0), (3, 0, 7, -1.0)])
    def test_direct_summation(self, m, n, ell, expected):
        assert KloostermanBasicSuite.naive(m, n, ell) == pytest.approx(expected, abs=1e-12)


class TestLogging:
    def test_file_handler(self, tmp_path):
        logfile = tmp_path / "run.log"
        configure_logging(logging.INFO, logfile)
        logging.getLogger("kuznetsov.test").info("hello")
        for handler in logging.getLogger("kuznetsov").handlers:
            handler.flush()
        assert "kuznetsov.test: hello" in logfile.read_text()

    def test_reconfigure_replaces_handlers(self):
        configure_logging(logging.DEBUG)
        configure_logging(logging.WARNING)
        logger = logging.getLogger("kuznetsov")
        assert len(logger.handlers) == 1
        assert logger.level == logging.WARNING


class FailingSuite(Suite):
    name = "failing"

    def checks(self):
        raise QuadratureError("integral did not converge", estimate=0.1)


class TestRunAll:
    def test_library_error_marks_suite_failed(self, tmp_path):
        failed = run_all(tmp_path, "3", suites={"failing": FailingSuite, "group": GroupSuite})
        assert failed == ["failing"]
        assert not (tmp_path / "failing.jsonl").exists()
        lines = (tmp_path / "group.jsonl").read_text().splitlines()
        assert [json.loads(line)["check"] for line in lines] == ["iwasawa_roundtrip", "bruhat_roundtrip", "action_cocycle"]

    def test_stops_when_asked(self, tmp_path):
        stop = Event()
        stop.set()
        assert run_all(tmp_path, suites={"group": GroupSuite}, stop=stop) == []
        assert list(tmp_path.iterdir()) == []
