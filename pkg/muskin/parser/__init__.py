from muskin.parser.config import ExperimentConfig, load_config, parse_config


__all__ = ("ExperimentConfig", "load_config", "parse_config")
