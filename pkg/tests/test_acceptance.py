import pytest

from lttower import acceptance


@pytest.mark.parametrize("number", [c[0] for c in acceptance.CRITERIA])
def test_criterion(number, capsys):
    (res,) = acceptance.run([number])
    with capsys.disabled():
        print("\n" + res.line())
    assert res.ok, res.line()
