"""Link-budget and unit plumbing: distances/gains/frequency to mean channel
power gains, dBm/dBi conversions, the default measurement scenario, and the
key=value scenario-file format.

The core library stores watts and linear gains only; unit suffixes are
accepted here and nowhere else.
"""

import math
from dataclasses import dataclass

SPEED_OF_LIGHT = 299_792_458.0  # m/s


@dataclass(frozen=True)
class LinkBudget:
    freq_hz: float
    d1_m: float            # power station -> device
    d2_m: float            # device -> receiving station
    exponent: float
    gain_ps_dbi: float
    gain_irs_dbi: float
    gain_wd_dbi: float

    def __post_init__(self):
        if not (self.freq_hz > 0 and self.d1_m > 0 and self.d2_m > 0):
            raise ValueError("frequency and distances must be positive")
        if not self.exponent > 0:
            raise ValueError("path-loss exponent must be positive")


def dbm_to_watts(x_dbm):
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


def watts_to_dbm(x_w):
    if not x_w > 0:
        raise ValueError("power must be positive")
    return 10.0 * math.log10(x_w) + 30.0


def dbi_to_linear(x_dbi):
    return 10.0 ** (x_dbi / 10.0)


def mean_gain(lb, which):
    """Mean channel power gain: Friis constant at the carrier wavelength with
    the exponent applied to the distance in meters (1 m reference)."""
    friis = (SPEED_OF_LIGHT / (4.0 * math.pi * lb.freq_hz)) ** 2
    if which == "downlink":
        gains = dbi_to_linear(lb.gain_ps_dbi) * dbi_to_linear(lb.gain_wd_dbi)
        d = lb.d1_m
    elif which == "uplink":
        gains = dbi_to_linear(lb.gain_wd_dbi) * dbi_to_linear(lb.gain_irs_dbi)
        d = lb.d2_m
    else:
        raise ValueError("which must be 'downlink' or 'uplink'")
    return gains * friis * d ** (-lb.exponent)


def table1_defaults():
    """Measured-circuit scenario constants: link budget, fitted harvester
    parameters, amplifier efficiency, noise power (W)."""
    from .ehmodel import NonLinearSigmoid
    lb = LinkBudget(freq_hz=868e6, d1_m=4.0, d2_m=10.0, exponent=2.8,
                    gain_ps_dbi=11.0, gain_irs_dbi=11.0, gain_wd_dbi=3.0)
    eh = NonLinearSigmoid(m_sat=9.079e-6, a=47083.0, b=2.9e-6)
    theta = 0.5
    sigma2 = dbm_to_watts(-96.0)
    return lb, eh, theta, sigma2


# scenario-file grammar: one `key = value` per line, '#' comments,
# units as suffixes (fail closed on unknown keys)

_POWER_UNITS = {"w": 1.0, "mw": 1e-3, "uw": 1e-6, "nw": 1e-9}
_FREQ_UNITS = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}

_KEYS = {
    "pt": "power", "sigma2": "power", "b": "power", "M": "power",
    "tau": "plain", "rate": "plain", "theta": "plain", "exponent": "plain",
    "a": "plain", "eta": "plain", "mu1": "plain", "mu2": "plain",
    "m1": "int", "m2": "int", "n1": "int", "n2": "int",
    "d1": "length", "d2": "length", "freq": "freq",
    "gain_ps": "dbi", "gain_irs": "dbi", "gain_wd": "dbi",
    "eh": "string", "table": "string",
}


def _parse_number(tokens, kind, key):
    text = " ".join(tokens)
    if kind == "string":
        return text
    unit = ""
    if len(tokens) >= 2 and not _is_number(tokens[-1]):
        unit = tokens[-1]
        text = " ".join(tokens[:-1])
    elif len(tokens) == 1:
        # allow a glued suffix like 27dBm
        head = tokens[0]
        i = len(head)
        while i > 0 and (head[i - 1].isalpha()):
            i -= 1
        if i < len(head):
            text, unit = head[:i], head[i:]
    if not _is_number(text):
        raise ValueError(f"cannot parse value for '{key}': {' '.join(tokens)}")
    value = float(text)
    u = unit.lower()
    if kind == "power":
        if u == "dbm":
            return dbm_to_watts(value)
        if u in _POWER_UNITS:
            return value * _POWER_UNITS[u]
        if u == "":
            return value  # watts
    elif kind == "freq":
        if u in _FREQ_UNITS:
            return value * _FREQ_UNITS[u]
        if u == "":
            return value
    elif kind == "length":
        if u in ("", "m"):
            return value
    elif kind == "dbi":
        if u in ("", "dbi"):
            return value
    elif kind == "int":
        if u == "" and value == int(value):
            return int(value)
    elif kind == "plain":
        if u == "":
            return value
    raise ValueError(f"bad unit '{unit}' for key '{key}'")


def _is_number(text):
    try:
        float(text)
        return True
    except ValueError:
        return False


def parse_setting(key, value_text):
    """Parse one scenario setting; raises ValueError on unknown keys."""
    key = key.strip()
    if key not in _KEYS:
        raise ValueError(f"unknown scenario key '{key}'")
    return key, _parse_number(value_text.split(), _KEYS[key], key)


def parse_scenario_file(path):
    settings = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value_text = line.partition("=")
            try:
                k, v = parse_setting(key, value_text)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            settings[k] = v
    return settings
