from config.settings import CONFIG, get_config


def test_defaults_present():
    for key in ("max_parallel", "allow_top_insertion", "measurement_policy", "sync_max_attempts", "sync_cache_dir",
                "log_level", "output_dir"):
        assert key in CONFIG
    assert get_config("max_parallel") >= 1
    assert get_config("missing") is None
