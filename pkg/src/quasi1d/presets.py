"""Named scenario documents for the standard parameter sets.

Every preset is a partial scenario document; user keys are merged on top
of it before validation. Rates are in units of the non-guided decay rate
``Gamma'`` unless a preset says otherwise (the bandgap presets use the
free-space rate ``Gamma_0``).
"""

import copy

__all__ = ["PRESETS", "PHOTONIC_CRYSTAL_DATA", "get_preset", "list_presets"]

# Measured and projected photonic-crystal waveguide figures of merit,
# shipped as data. Rates are in units of Gamma_0; lattice constant in nm.
PHOTONIC_CRYSTAL_DATA = {
    "alligator": {
        "gamma_1d_max_at_cavity_resonance": 1.5,
        "gamma_prime": 1.1,
        "bandgap_detuning_ghz": 60.0,
        "j_1d_max_bandgap": -0.2,
        "gamma_1d_max_bandgap": 0.01,
        "interaction_range_in_lattice_constants": 80.0,
        "lattice_constant_nm": 370.0,
    },
    "slot_projected": {
        "group_index": 30.0,
        "gamma_1d_max_at_cavity_resonance_over_gamma_prime": 44.0,
        "bandgap_detuning_ghz": 20.0,
        "j_1d_max_bandgap_over_gamma_prime": -6.0,
        "gamma_1d_max_bandgap_over_gamma_prime": 0.3,
        "gamma_prime": 0.5,
        "interaction_range_in_lattice_constants": 80.0,
        "lattice_constant_nm": 370.0,
    },
}

PRESETS = {
    "fig1b": {
        "name": "single emitter Fano family",
        "model": {"type": "local", "gamma_1d": 1.0},
        "chain": {"gamma_prime": 1.0, "geometry": {"kind": "explicit", "positions": [0.0]}},
        "analyses": {
            "fano": {"j_ratios": [0.0, 1.0, 2.0, 5.0],
                     "grid": {"start": -15.0, "stop": 15.0, "num": 1201}},
        },
    },
    "fig2": {
        "name": "five-emitter waveguide mode chart",
        "model": {"type": "waveguide", "gamma_1d": 1.0},
        "chain": {"gamma_prime": 1.0, "geometry": {"kind": "regular", "n": 5, "spacing": 0.5}},
        "analyses": {
            "modes": {"sweep": {"path": "chain.geometry.spacing",
                                "start": 0.005, "stop": 1.0, "num": 200}},
        },
    },
    "fig3": {
        "name": "twenty emitters, regular and random",
        "model": {"type": "waveguide", "gamma_1d": 1.0},
        "chain": {"gamma_prime": 1.0, "geometry": {
            "kind": "random", "n": 20, "length": 1.0, "seed": 20170101,
            "realizations": 10, "regular_spacing": 0.5}},
        "analyses": {
            "spectrum": {"grid": {"start": -30.0, "stop": 30.0, "num": 2001}},
            "beer_lambert": {"grid": {"start": -30.0, "stop": 30.0, "num": 2001}},
        },
    },
    "fig4": {
        "name": "bandgap chain shifts versus interaction range",
        "model": {"type": "bandgap", "j_max": -1.0, "kappa_x": 1.0, "lattice_constant": 1.0},
        "chain": {"gamma_prime": 1.0, "geometry": {"kind": "regular", "n": 10, "spacing": 2.0}},
        "analyses": {
            "modes": {"sweep": {"path": "model.kappa_x", "start": 0.0005, "stop": 2.5, "num": 200}},
        },
    },
    "fig4b": {
        "name": "two-emitter bandgap spin exchange",
        "model": {"type": "bandgap", "j_max": -3.0, "kappa_x": 1.0 / 80.0,
                  "lattice_constant": 1.0, "residual_gamma": 0.15},
        "chain": {"gamma_prime": 0.5, "geometry": {"kind": "regular", "n": 2, "spacing": 2.0}},
        "analyses": {
            "dynamics": {"initial": [1.0, 0.0], "detuning": 0.0, "noninteracting": True},
        },
        "units": {"reference_rate": "Gamma_0"},
        "data": {"photonic_crystal": PHOTONIC_CRYSTAL_DATA},
    },
    "figEIT": {
        "name": "EIT transparency window",
        "model": {"type": "waveguide", "gamma_1d": 0.5},
        "chain": {"gamma_prime": 1.0, "geometry": {"kind": "regular", "n": 5, "spacing": 0.25}},
        "analyses": {
            "eit": {"omega_c": 1.0, "grid": {"start": -4.0, "stop": 4.0, "num": 2001}},
        },
    },
    "fig5": {
        "name": "cavity spectra beyond the Markov approximation",
        "model": {"type": "cavity_nonmarkov", "gamma_1d": 1.0, "kappa": 0.2},
        "chain": {"gamma_prime": 1.0, "geometry": {"kind": "regular", "n": 10, "spacing": 1.0}},
        "analyses": {
            "nonmarkov": {
                "grid": {"start": -55.0, "stop": 55.0, "num": 2201},
                "sweep": [
                    {"kappa": 0.2, "cavity_detuning_ratio": 0.0},
                    {"kappa": 1000.0, "cavity_detuning_ratio": 0.0},
                    {"kappa": 0.2, "cavity_detuning_ratio": 1.0},
                    {"kappa": 1000.0, "cavity_detuning_ratio": 1.0},
                ],
            },
        },
    },
}


def list_presets():
    return sorted(PRESETS)


def get_preset(name):
    """Deep copy of a preset document with its name recorded."""
    try:
        doc = copy.deepcopy(PRESETS[name])
    except KeyError:
        from .errors import ConfigError

        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(list_presets())}",
                          "preset") from None
    doc["preset"] = name
    return doc
