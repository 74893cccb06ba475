from pathlib import Path
import string
import os
from typing import Any, Dict, Optional
from enum import Enum, auto

import tomli
from loguru import logger

ALLOWED_FILENAME_LETTERS = string.ascii_letters + string.digits + "-_"
PACKAGED_DIR = os.path.join(os.path.dirname(__file__), "files")


class ConfigFileType(Enum):
    LOCAL = auto()
    PACKAGED = auto()


def load_toml_file(filename: str) -> Optional[Dict[str, Any]]:
    try:
        file_content = _load_file(filename)
    except Exception as e:
        logger.error("error locating config file '{f}':\n {e}", f=filename, e=e)
        return None

    try:
        return tomli.loads(file_content)
    except tomli.TOMLDecodeError as e:
        logger.error("invalid TOML config file '{f}':\n {e}", f=filename, e=e)
        return None


def get_config_type(path: str) -> ConfigFileType:
    if _only_acceptable_chars(path):
        return ConfigFileType.PACKAGED
    return ConfigFileType.LOCAL


def get_path_relative_to(filepath: str, parent_filepath: str) -> str:
    if get_config_type(filepath) != ConfigFileType.LOCAL or os.path.isabs(filepath):
        return filepath
    if get_config_type(parent_filepath) == ConfigFileType.PACKAGED:
        return filepath
    return os.path.abspath(os.path.join(os.path.dirname(parent_filepath), filepath))


def packaged_names() -> list:
    return sorted(Path(name).stem for name in os.listdir(PACKAGED_DIR) if name.endswith(".toml"))


def _only_acceptable_chars(filepath: str) -> bool:
    return all(x in ALLOWED_FILENAME_LETTERS for x in filepath)


def _load_file(path: str) -> str:
    if get_config_type(path) == ConfigFileType.PACKAGED:
        return _load_local_file(os.path.join(PACKAGED_DIR, path + ".toml"), path, "packaged")
    return _load_local_file(path, path, "found locally")


def _load_local_file(filepath: str, passed_name: str, message: str) -> str:
    if not (Path(filepath).exists() and Path(filepath).is_file()):
        raise FileNotFoundError(f"configuration file '{passed_name}' not {message}.")

    with open(filepath, encoding="utf8") as f:
        return f.read()
