import json

from utils.json_validator import PatternValidator

PATTERN = '{"n":3,"delta":"1/3","survivors":[1,3],"landing":[[1,1],[3,2]],"q":0}'


def test_plain_pattern():
    ok, pattern, error = PatternValidator.validate(PATTERN)
    assert ok and error is None
    assert pattern.deleted() == [2]


def test_hand_edited_pattern():
    text = """{
        // dropped the middle register
        "n": 3, "delta": "1/3",
        "survivors": [1, 3],
        "landing": [[1, 1], [3, 2],],
        "q": 0,
    }"""
    ok, pattern, _ = PatternValidator.validate(text)
    assert ok and pattern.survivors == (1, 3)


def test_counterexample_line():
    line = json.dumps({"checks": ["2c+e<=p+q"], "fill": "neighbour", "pattern": json.loads(PATTERN)})
    ok, pattern, _ = PatternValidator.validate(line)
    assert ok and pattern.n == 3
    assert PatternValidator.fill_name(line) == "neighbour"
    assert PatternValidator.fill_name(PATTERN) is None


def test_rejects_garbage():
    ok, pattern, error = PatternValidator.validate("{not json")
    assert not ok and pattern is None and "JSON error" in error


def test_rejects_over_budget_pattern():
    ok, _, error = PatternValidator.validate('{"n":3,"delta":"0","survivors":[1],"landing":[[1,1]],"q":0}')
    assert not ok and "not a valid noise pattern" in error


def test_rejects_non_object():
    assert PatternValidator.validate("[1, 2]")[0] is False
