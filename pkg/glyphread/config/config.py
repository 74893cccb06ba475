from glyphread.options import UnionT, ImmutableT, Option, T, BASE_CONFIG, DEFAULT_CONFIG
from glyphread.option_parses import OptionParse, get_option_parses, TakesVal
from glyphread.config.file_config import load_toml_file, get_path_relative_to
from glyphread.config.utils import print_invalid_type_message, config_file_val_to_str
from typing import Dict, Generic, Iterator, List, Optional, Set, Tuple

from dataclasses import dataclass
from argparse import Namespace
from loguru import logger


@dataclass(frozen=True)
class Arg(Generic[T]):
    option: Option
    val: T


UnprocessedArg = Arg[Optional[str]]
ProcessedArg = Arg[UnionT]
ImmutableArg = Arg[ImmutableT]


class Config:
    """
    Option values from one source, later values overriding earlier ones.
    """

    config: List[ProcessedArg]

    def _convert(self, args: List[UnprocessedArg]) -> List[ProcessedArg]:
        result = []
        for arg in args:
            converted = self.option_parses[arg.option].convert(arg.val)
            if converted is None and arg.option != Option.CONFIG_FILE:
                print_invalid_type_message(arg.option, arg.val)
                continue
            result.append(ProcessedArg(arg.option, converted))
        return result

    def __init__(
        self,
        source: Optional[str] = None,
        config: Optional[List[UnprocessedArg]] = None,
        option_parses: Dict[Option, OptionParse] = get_option_parses(),
    ) -> None:
        self.source = source
        self.option_parses = option_parses
        self.config = self._convert(config if config is not None else [])

    @staticmethod
    def combine(lt: "Config", rt: "Config") -> "Config":
        assert lt.option_parses == rt.option_parses
        new = Config(rt.source, option_parses=lt.option_parses)
        new.config = lt.config + rt.config
        return new

    def __str__(self) -> str:
        return f"Config({', '.join(arg.option.name + '=' + str(arg.val) for arg in self.config)})"

    def get_last_value(self, option: Option, use_default: bool) -> Optional[UnionT]:
        for arg in reversed(self.config):
            if arg.option == option:
                return arg.val
        return None if not use_default else self.option_parses[option].default

    @staticmethod
    def _to_immutable(val: UnionT) -> ImmutableT:
        return val if not isinstance(val, list) else tuple(val)

    def to_immutable(self) -> "ImmutableConfig":
        ordered_args = [ProcessedArg(o, self.option_parses[o].default) for o in Option]
        for arg in self.config:
            ordered_args[int(arg.option)] = arg
        return ImmutableConfig(
            tuple(ImmutableArg(o, self._to_immutable(ordered_args[int(o)].val)) for o in Option)
        )


@dataclass(frozen=True)
class ImmutableConfig:
    config: Tuple[ImmutableArg, ...]

    def __str__(self) -> str:
        return (
            "ImmutableConfig(\n"
            + "".join(f"  {arg.option.to_name()}={str(arg.val)}\n" for arg in self.config)
            + ")"
        )

    def __getitem__(self, option: Option) -> ImmutableT:
        return self.config[int(option)].val

    def __contains__(self, option: Option) -> bool:
        return self[option] is not None

    def __iter__(self) -> Iterator[ImmutableArg]:
        return iter(self.config)

    def to_dict(self) -> Dict[str, ImmutableT]:
        return {arg.option.to_name(): arg.val for arg in self.config}


def parse_option(
    option_parses: Dict[Option, OptionParse],
    name: str,
    val: Optional[str],
) -> Optional[Option]:
    option = Option.safe_from_name(name)

    if option is None:
        logger.warning("unrecognized option {name}", name=name)
    else:
        option_parse = option_parses[option]
        if option_parse.takes_val == TakesVal.YES and val is None:
            logger.warning("option {name} takes an argument but none was supplied", name=name)
        elif option_parse.takes_val == TakesVal.NO and val is not None:
            logger.warning(
                "option {name} takes no argument but {val} was supplied", name=name, val=val
            )
        else:
            return option
    return None


def parse_args(args: List[str], option_parses: Dict[Option, OptionParse]) -> List[UnprocessedArg]:
    def get_name_val(arg: str) -> Tuple[str, Optional[str]]:
        if "=" in arg:
            name, val = arg.split("=", 1)
            return name.strip(), val.strip()
        return arg.strip(), None

    result: List[UnprocessedArg] = []
    for arg in args:
        name, val = get_name_val(arg)
        option = parse_option(option_parses, name, val)
        if option is not None:
            result.append(UnprocessedArg(option, val))
    return result


def parse_cmd_config(args: List[str], option_parses: Dict[Option, OptionParse]) -> Config:
    return Config("cmd", parse_args(args, option_parses), option_parses)


def parse_config_file(
    path: str, option_parses: Dict[Option, OptionParse], seen: Optional[Set[str]] = None
) -> Optional[Config]:
    """
    Options of the config file at ``path`` on top of the file it names in
    ``config-file``, resolved recursively down to the empty base config.
    """
    seen = set() if seen is None else seen
    if path in seen:
        logger.error("config file '{f}' includes itself", f=path)
        return None
    seen.add(path)

    config_dict = load_toml_file(path)
    if config_dict is None:
        return None

    if path == BASE_CONFIG:
        base: Optional[Config] = Config(option_parses=option_parses)
    else:
        rec_config = config_dict.get(Option.CONFIG_FILE.to_name(), BASE_CONFIG)
        if not isinstance(rec_config, str):
            print_invalid_type_message(Option.CONFIG_FILE, rec_config)
            rec_config = BASE_CONFIG
        base = parse_config_file(get_path_relative_to(rec_config, path), option_parses, seen)
    if base is None:
        return None

    result = []
    for name, val in config_dict.items():
        option = parse_option(option_parses, name, val)
        # config-file is handled as the base above
        if option is None or option == Option.CONFIG_FILE:
            continue
        str_val = config_file_val_to_str(option, val)
        if str_val is not None:
            result.append(UnprocessedArg(option, str_val))

    return Config.combine(base, Config(path, result, option_parses))


def get_config(
    cmd_args: List[str], option_parses: Dict[Option, OptionParse] = get_option_parses()
) -> Optional[ImmutableConfig]:
    """
    Option defaults, then the config file (``config-file`` from the command
    line or the packaged default), then the command-line options.
    """
    cmd_config = parse_cmd_config(cmd_args, option_parses)
    config_path = cmd_config.get_last_value(Option.CONFIG_FILE, use_default=False) or DEFAULT_CONFIG
    file_config = parse_config_file(str(config_path), option_parses)
    if file_config is None:
        return None
    return Config.combine(file_config, cmd_config).to_immutable()


def get_cmd_args(args: Namespace) -> List[str]:
    return list(args.options or [])
