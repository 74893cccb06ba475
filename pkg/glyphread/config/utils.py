from typing import Any, Optional, Union
from loguru import logger

from glyphread.options import Option


def print_invalid_type_message(option: Union[Option, str], val: Any) -> None:
    logger.warning(
        "invalid value {val} of type {type} for option {option}",
        type=type(val).__name__,
        val=val,
        option=option.to_name() if isinstance(option, Option) else option,
    )


def config_file_val_to_str(option: Union[Option, str], val: Any) -> Optional[str]:
    """Textual form of a TOML value, as it would be written after ``-o name=``."""
    if isinstance(val, bool):
        return "true" if val else "false"
    if isinstance(val, (int, float)):
        return repr(val)
    if isinstance(val, str):
        return val
    if isinstance(val, list) and all(isinstance(v, list) and len(v) == 2 for v in val):
        return ",".join(f"{a}x{b}" for a, b in val)
    if isinstance(val, list) and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in val):
        return ",".join(repr(v) for v in val)
    print_invalid_type_message(option, val)
    return None
