"""JSON wire format of points and certificates."""

import json
from typing import Any, Final

import voluptuous as vol

from .const import ENGINES
from .convergence import ConvergenceCertificate, LocatedLimit
from .dsl import parse_space
from .dyadic import Dyadic
from .engines import NiceSystem
from .errors import ConfigError, RamseyError
from .spaces import (
    INF,
    CantorDepth,
    CantorPoint,
    FiniteDiscrete,
    OmegaPlusOne,
    Point,
    Product,
    Space,
    UnitCube,
)

_NAT: Final = vol.All(int, vol.Range(min=0))

CERTIFICATE_SCHEMA: Final[vol.Schema] = vol.Schema(
    {
        vol.Required("engine"): vol.In(ENGINES),
        vol.Required("arity"): vol.All(int, vol.Range(min=1)),
        vol.Required("space"): str,
        vol.Required("stream_prefix"): [_NAT],
        vol.Required("limit_centers"): list,
        vol.Required("levels"): [{vol.Required("n"): _NAT, vol.Required("threshold"): _NAT}],
        vol.Optional("fuel_report", default={}): {str: int},
        vol.Optional("partial", default=False): bool,
        vol.Optional("function", default=None): vol.Any(None, str),
        vol.Optional("max_level"): int,
    },
    extra=vol.ALLOW_EXTRA,
)


def encode_dyadic(x: Dyadic) -> dict[str, int]:
    """Return {"num": a, "exp": e} for a / 2**e."""
    return {"num": x.numerator, "exp": x.exponent}


def decode_dyadic(obj: Any) -> Dyadic:
    """Inverse of encode_dyadic."""
    if not (
        isinstance(obj, dict)
        and set(obj) == {"num", "exp"}
        and all(isinstance(v, int) and not isinstance(v, bool) for v in obj.values())
        and obj["exp"] >= 0
    ):
        raise ConfigError(f"malformed dyadic {obj!r}")
    return Dyadic(obj["num"], obj["exp"])


def encode_point(space: Space, p: Point) -> Any:
    """Return the JSON form of p."""
    match space:
        case OmegaPlusOne():
            return "inf" if p is INF else p
        case UnitCube(dimension=1):
            return encode_dyadic(p[0])  # type: ignore[index]
        case UnitCube():
            return [encode_dyadic(x) for x in p]  # type: ignore[union-attr]
        case CantorDepth():
            assert isinstance(p, CantorPoint)
            return {"prefix": list(p.prefix), "tail": p.tail}
        case FiniteDiscrete():
            return p
        case Product():
            return [encode_point(space.coordinate_space(i), x) for i, x in enumerate(p)]  # type: ignore[arg-type]
    raise ConfigError(f"cannot encode points of {space}")


def decode_point(space: Space, obj: Any) -> Point:
    """Return the point of space encoded by obj."""
    try:
        match space:
            case OmegaPlusOne():
                return space.coerce(INF if obj == "inf" else obj)
            case UnitCube(dimension=1):
                return space.coerce((decode_dyadic(obj),))
            case UnitCube():
                return space.coerce(tuple(decode_dyadic(x) for x in obj))
            case CantorDepth():
                return CantorPoint(tuple(obj["prefix"]), obj["tail"])
            case FiniteDiscrete():
                return space.coerce(obj)
            case Product():
                if not isinstance(obj, list):
                    raise ConfigError(f"product point must be a list, got {obj!r}")
                return space.coerce(
                    tuple(decode_point(space.coordinate_space(i), x) for i, x in enumerate(obj))
                )
    except (TypeError, KeyError, RamseyError) as err:
        if isinstance(err, ConfigError):
            raise
        raise ConfigError(f"malformed point {obj!r} of {space}: {err}") from err
    raise ConfigError(f"cannot decode points of {space}")


def certificate_to_dict(
    cert: ConvergenceCertificate, function: str | None = None, **extra: Any
) -> dict[str, Any]:
    """Return the JSON object of a certificate."""
    return {
        "engine": cert.engine,
        "arity": cert.arity,
        "space": cert.space.descriptor,
        "function": function,
        "max_level": cert.max_level,
        "stream_prefix": list(cert.prefix),
        "limit_centers": [encode_point(cert.space, c) for c in cert.limit.centers],
        "levels": [{"n": n, "threshold": t} for n, t in cert.levels],
        "fuel_report": dict(cert.fuel_report),
        "partial": cert.partial,
        **extra,
    }


def nice_to_dict(system: NiceSystem, function: str | None = None) -> dict[str, Any]:
    """Return the JSON object of a nice system: top certificate, sections and lower system."""
    extra: dict[str, Any] = {
        "sections": [
            {"s": list(s), "certificate": certificate_to_dict(cert, f"{function}{list(s)}")}
            for s, cert in sorted(system.sections.items())
        ]
    }
    if system.lower is not None:
        extra["lower"] = nice_to_dict(system.lower, f"x[{function}]")
    return certificate_to_dict(system.certificate, function, **extra)


def certificate_from_dict(data: Any) -> ConvergenceCertificate:
    """Return the certificate described by a JSON object."""
    try:
        valid: dict[str, Any] = CERTIFICATE_SCHEMA(data)
    except vol.Invalid as err:
        raise ConfigError(f"malformed certificate: {err}") from err
    space: Space = parse_space(valid["space"])
    levels: list[dict[str, int]] = valid["levels"]
    if [level["n"] for level in levels] != list(range(len(levels))):
        raise ConfigError("certificate levels must be numbered 0, 1, ...")
    if len(levels) != len(valid["limit_centers"]):
        raise ConfigError("certificate needs one center per level")
    return ConvergenceCertificate(
        arity=valid["arity"],
        space=space,
        prefix=tuple(valid["stream_prefix"]),
        limit=LocatedLimit(tuple(decode_point(space, c) for c in valid["limit_centers"])),
        thresholds=tuple(level["threshold"] for level in levels),
        engine=valid["engine"],
        fuel_report=valid["fuel_report"],
        partial=valid["partial"],
    )


def dumps(data: Any) -> str:
    """Serialize deterministically."""
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def loads(text: str) -> Any:
    """Parse JSON text, reporting failures as configuration errors."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"malformed JSON: {err}") from err
