import os
import tempfile

from reidtrack.log import base


def test_log_file() -> None:
    with tempfile.TemporaryDirectory() as temp_dir:
        log_path = os.path.join(temp_dir, "run.log")
        try:
            base.set_log_config(base.ERROR, log_path)
            base.debug("quiet message")
            base.warn("loud message")
            base.log_package_versions()
            with open(log_path, "r") as file:
                contents = file.read()
            assert ":DEBUG: quiet message" in contents
            assert ":WARNING: loud message" in contents
            assert "numpy==" in contents
        finally:
            base.set_log_config()


def test_error() -> None:
    with tempfile.TemporaryDirectory() as temp_dir:
        log_path = os.path.join(temp_dir, "run.log")
        try:
            base.set_log_config(base.ERROR + 1, log_path)
            try:
                base.error("broken")
                raise AssertionError("Expected LogError")
            except base.LogError as e:
                assert "broken" in str(e)

            def fail(value: int) -> None:
                raise KeyError(value)

            try:
                base.error_catch(fail, 3)
                raise AssertionError("Expected KeyError")
            except KeyError:
                pass
            assert base.error_catch(lambda x, y=1: x + y, 2, y=5) == 7
            with open(log_path, "r") as file:
                contents = file.read()
            assert ":ERROR: broken" in contents
            assert "KeyError" in contents
        finally:
            base.set_log_config()
