import os

import setup


def test_numerical_stack_is_supported(capsys):
    assert setup.check_stack()
    out = capsys.readouterr().out
    assert all(name in out for name in setup.STACK_MAJORS)


def test_output_locations_follow_config(output_dirs, capsys):
    setup.prepare_output_locations()
    assert os.path.isdir(output_dirs["output_dir"])
    assert os.path.isdir(output_dirs["reports_dir"])
    assert os.path.isdir(os.path.dirname(output_dirs["run_index_path"]))
    assert "size caps" in capsys.readouterr().out
