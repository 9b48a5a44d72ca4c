"""Scenario documents: loading, validation, execution and serialization.

A scenario is one JSON document naming a reservoir model, a chain
geometry and the analyses to run. It is validated against the schema
shipped in ``quasi1d/data/scenario.schema.json``; defaults declared there
are filled in, so the loaded document is in canonical form.

Every CSV starts with ``# config_sha256=<hash>`` where the hash covers the
canonical document minus its ``output`` section. Numbers are written with
17 significant digits and ``\\n`` line endings, so a rerun of the same
document produces byte-identical files.
"""

import copy
import hashlib
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List

import jsonschema
import numpy as np

from . import __version__
from .collective import (EmitterChain, ModeTable, build_coupling_matrix, classify_modes,
                         decompose)
from .dynamics import default_time_grid, evolve, zero_offdiagonal
from .eit import EITSpectrum, eit_transmission, keff_coefficients, keff_exact
from .errors import ConfigError, Quasi1DError, ScenarioError
from .greens import (BandgapModel, CavityModel, LocalModel, WaveguideModel,
                     cavity_green_two_mirror, frequency_dependent_cavity)
from .layered import HelmholtzSolution, LayeredReservoir, LayeredStack, Slab
from .presets import get_preset
from .spectra import (beer_lambert, default_detuning_grid, fano, nonmarkov_spectrum,
                      scattering, transmission_product)

__all__ = [
    "SCHEMA",
    "ScenarioResult",
    "load_config",
    "parse_config",
    "dump_config",
    "config_hash",
    "apply_overrides",
    "build_model",
    "build_chains",
    "run_scenario",
    "write_csv",
    "ANALYSES",
]

log = logging.getLogger(__name__)

SCHEMA = json.loads(
    resources.files("quasi1d").joinpath("data/scenario.schema.json").read_text()
)

ANALYSES = ("spectrum", "modes", "dynamics", "eit", "greens", "fano", "beer_lambert", "nonmarkov")


def _with_defaults(cls):
    base = cls.VALIDATORS["properties"]

    def properties(validator, props, instance, schema):
        if isinstance(instance, dict):
            for key, sub in props.items():
                if "default" in sub and key not in instance:
                    instance[key] = copy.deepcopy(sub["default"])
        yield from base(validator, props, instance, schema)

    return jsonschema.validators.extend(cls, {"properties": properties})


_Validator = _with_defaults(jsonschema.Draft7Validator)


# -- documents -------------------------------------------------------------


def merge_documents(base, top):
    """Deep merge: objects merge key by key, anything else in ``top`` wins."""
    out = copy.deepcopy(base)
    for key, value in top.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = merge_documents(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(doc, overrides):
    """Set dotted-path keys, e.g. ``"chain.geometry.n=12"``.

    Values are parsed as JSON when possible and kept as strings otherwise.
    """
    doc = copy.deepcopy(doc)
    for item in overrides or ():
        if isinstance(item, str):
            if "=" not in item:
                raise ConfigError(f"override {item!r} is not key=value")
            key, raw = item.split("=", 1)
            value = _parse_value(raw)
        else:
            key, value = item
        parts = key.strip().split(".")
        if not all(parts):
            raise ConfigError(f"bad override key {key!r}")
        node = doc
        for p in parts[:-1]:
            child = node.get(p)
            if child is None:
                child = node[p] = {}
            if not isinstance(child, dict):
                raise ConfigError("cannot descend into a non-object", key)
            node = child
        node[parts[-1]] = value
    return doc


def _error_path(err):
    return ".".join(str(p) for p in err.absolute_path)


def parse_config(doc, overrides=None):
    """Expand a preset reference, apply overrides, validate and fill defaults."""
    if not isinstance(doc, dict):
        raise ConfigError("scenario document must be a JSON object")
    doc = copy.deepcopy(doc)
    if "preset" in doc:
        name = doc.pop("preset")
        doc = merge_documents(get_preset(name), doc)
    doc = apply_overrides(doc, overrides)
    validator = _Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), e.message))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        raise ConfigError(f"invalid scenario: {err.message}", _error_path(err))
    _semantic_checks(doc)
    return doc


def _semantic_checks(doc):
    model, geometry = doc["model"]["type"], doc["chain"]["geometry"]
    analyses = doc["analyses"]
    propagating = model in ("waveguide", "cavity", "layered")
    opts = analyses.get("spectrum")
    if opts is not None and opts["method"] != "product" and not propagating:
        raise ConfigError(f"model '{model}' has no guided channel; use method 'product'",
                          "analyses.spectrum.method")
    if model == "cavity_nonmarkov":
        bad = set(analyses) - {"nonmarkov"}
        if bad:
            raise ConfigError("the frequency-resolved cavity supports only 'nonmarkov'",
                              "analyses." + sorted(bad)[0])
    elif "nonmarkov" in analyses:
        raise ConfigError("'nonmarkov' needs model type 'cavity_nonmarkov'", "analyses.nonmarkov")
    if "fano" in analyses and model != "local":
        raise ConfigError("'fano' needs model type 'local'", "analyses.fano")
    if "beer_lambert" in analyses and model not in ("waveguide", "local"):
        raise ConfigError("'beer_lambert' needs a model with a uniform gamma_1d",
                          "analyses.beer_lambert")
    eit = analyses.get("eit")
    if eit is not None and "spacing" not in eit and geometry["kind"] != "regular":
        raise ConfigError("'eit' needs a spacing for non-regular chains", "analyses.eit.spacing")
    dyn = analyses.get("dynamics")
    if dyn is not None and "initial" in dyn and geometry["kind"] != "random":
        n = len(geometry["positions"]) if geometry["kind"] == "explicit" else geometry["n"]
        if len(dyn["initial"]) != n:
            raise ConfigError(f"expected {n} initial amplitudes", "analyses.dynamics.initial")
    sweep = analyses.get("modes", {}).get("sweep")
    if sweep is not None:
        try:
            node = doc
            for p in sweep["path"].split("."):
                node = node[p]
        except (KeyError, TypeError):
            raise ConfigError("sweep path does not name a field", "analyses.modes.sweep.path")
        if isinstance(node, bool) or not isinstance(node, (int, float)):
            raise ConfigError("sweep path must name a numeric field", "analyses.modes.sweep.path")


def load_config(source, overrides=None):
    """Load a scenario from a path, JSON text, or an already-parsed dict.

    Raises
    ------
    ConfigError
        On unreadable files, JSON syntax errors, or schema violations; the
        error's ``path`` names the offending field.
    """
    if isinstance(source, dict):
        return parse_config(source, overrides)
    text = str(source)
    if isinstance(source, os.PathLike) or not text.lstrip().startswith("{"):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc.msg} (line {exc.lineno})") from exc
    return parse_config(doc, overrides)


def dump_config(config):
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(config, sort_keys=True, indent=2) + "\n"


def config_hash(config):
    body = {k: v for k, v in config.items() if k != "output"}
    text = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


# -- building blocks -------------------------------------------------------


def _complex(value):
    return complex(*value) if isinstance(value, list) else complex(value)


def build_model(opts):
    kind = opts["type"]
    if kind == "waveguide":
        return WaveguideModel(opts["gamma_1d"], opts["k_p"])
    if kind == "bandgap":
        return BandgapModel(opts["j_max"], opts["kappa_x"], opts["lattice_constant"],
                            opts["residual_gamma"])
    if kind == "local":
        return LocalModel(opts["gamma_1d"], opts["j_1d"])
    if kind == "cavity":
        common = dict(area=opts["area"], detuning=opts["detuning"], variant=opts["variant"])
        if "kappa" in opts:
            return CavityModel.from_linewidth(opts["kappa"], opts["g0"], opts["length"],
                                              opts["mode_number"], **common)
        return CavityModel(opts["reflectivity"], opts["length"], opts["mode_number"],
                           opts["g0"], **common)
    if kind == "layered":
        stack = LayeredStack(
            tuple(Slab(s["thickness"], _complex(s["permittivity"])) for s in opts["slabs"]),
            _complex(opts["outer_permittivity"]), opts["area"], opts["origin"])
        return LayeredReservoir(stack, opts["omega"], opts["gamma_1d"])
    if kind == "cavity_nonmarkov":
        return None  # built per grid in the non-Markov analysis
    raise ConfigError(f"unknown model type {kind!r}", "model.type")


def build_chains(opts):
    """List of ``(label, EmitterChain)``; several for random ensembles."""
    geo, gp = opts["geometry"], opts["gamma_prime"]
    kind = geo["kind"]
    if kind == "explicit":
        return [("chain", EmitterChain(np.asarray(geo["positions"], dtype=float), gp))]
    if kind == "regular":
        return [("chain", EmitterChain.regular(geo["n"], geo["spacing"], geo["start"], gp))]
    chains = []
    if "regular_spacing" in geo:
        chains.append(("regular", EmitterChain.regular(geo["n"], geo["regular_spacing"],
                                                       geo["start"], gp)))
    for i in range(geo["realizations"]):
        rng = np.random.default_rng([geo["seed"], i])
        x = geo["start"] + geo["length"] * rng.random(geo["n"])
        chains.append((f"random_{i + 1:02d}", EmitterChain(x, gp)))
    return chains


def _grid(opts, fallback):
    if opts is None:
        return fallback
    return np.linspace(opts["start"], opts["stop"], opts["num"])


# -- output ----------------------------------------------------------------


def _fmt(value):
    return "%.16e" % float(value)


def write_csv(path, columns, rows, digest):
    lines = [f"# config_sha256={digest}", ",".join(columns)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


@dataclass
class _Output:
    name: str
    analysis: str
    columns: tuple
    rows: list
    metadata: Dict[str, Any] = field(default_factory=dict)
    table: Any = None


@dataclass
class ScenarioResult:
    """Everything a run produced. ``tables`` maps file names to result objects."""

    config: Dict[str, Any]
    config_sha256: str
    directory: Path
    files: List[Path]
    tables: Dict[str, Any]
    metadata: Dict[str, Any]

    def summary(self):
        counts = {}
        for out in self.metadata["files"].values():
            counts[out["analysis"]] = counts.get(out["analysis"], 0) + 1
        return {"status": "ok", "scenario": self.config.get("name"),
                "config_sha256": self.config_sha256, "directory": str(self.directory),
                "files": [p.name for p in self.files], "counts": counts}


def _label(base, label, many, suffix=""):
    return f"{base}_{label}{suffix}.csv" if many else f"{base}{suffix}.csv"


def _jsonable(meta):
    out = {}
    for k, v in meta.items():
        if isinstance(v, (np.floating, np.integer)):
            v = v.item()
        elif isinstance(v, (complex, np.complexfloating)):
            v = [float(v.real), float(v.imag)]
        elif isinstance(v, dict):
            v = _jsonable(v)
        out[k] = v
    return out


# -- analyses --------------------------------------------------------------


def _spectrum(cfg, model, chains, many):
    opts = cfg["analyses"]["spectrum"]
    gp = cfg["chain"]["gamma_prime"]
    outs = []
    for label, chain in chains:
        g = build_coupling_matrix(chain, model)
        grid = _grid(opts.get("grid"), None)
        if grid is None:
            grid = default_detuning_grid(gp, 2.0 * np.linalg.eigvals(g.values).imag)
        variants = [(False, g)]
        if opts["noninteracting"]:
            variants.append((True, zero_offdiagonal(g)))
        for free, mat in variants:
            # independent emitters multiply; the probe-point solve would only
            # give the first-order sum for a diagonal matrix
            if opts["method"] == "product" or free:
                table = transmission_product(grid, decompose(mat), gp)
            else:
                table = scattering(grid, mat, gp, model, chain.positions, method=opts["method"])
                if not opts["reflection"]:
                    table.r = None
            name = _label("spectrum", label, many, "_noninteracting" if free else "")
            outs.append(_Output(name, "spectrum", table.columns, list(table.rows()),
                                dict(table.metadata, chain=label, noninteracting=free), table))
    return outs


def _modes_rows(g, gp, threshold):
    return classify_modes(decompose(g), gp, threshold)


def _modes(cfg, model, chains, many, pool):
    opts = cfg["analyses"]["modes"]
    gp = cfg["chain"]["gamma_prime"]
    sweep = opts.get("sweep")
    outs = []
    if sweep is None:
        for label, chain in chains:
            table = _modes_rows(build_coupling_matrix(chain, model), gp, opts["bright_threshold"])
            outs.append(_Output(_label("modes", label, many), "modes", table.columns,
                                list(table.rows()),
                                {"chain": label, "n_bright": table.n_bright,
                                 "n_dark": table.n_dark}, table))
        return outs

    values = np.linspace(sweep["start"], sweep["stop"], sweep["num"])
    n_chains = len(chains)

    def point(value):
        doc = apply_overrides(cfg, [(sweep["path"], float(value))])
        m = build_model(doc["model"])
        res = []
        for label, chain in build_chains(doc["chain"]):
            res.append(_modes_rows(build_coupling_matrix(chain, m), gp, opts["bright_threshold"]))
        return res

    tables = list(pool.map(point, values))
    for c, (label, _) in enumerate(chains[:n_chains]):
        rows = [(v,) + row for v, per in zip(values, tables) for row in per[c].rows()]
        columns = ("sweep_value",) + ModeTable.columns
        outs.append(_Output(_label("modes", label, many), "modes", columns, rows,
                            {"chain": label, "sweep_path": sweep["path"]},
                            [per[c] for per in tables]))
    return outs


def _dynamics(cfg, model, chains, many):
    opts = cfg["analyses"]["dynamics"]
    gp = cfg["chain"]["gamma_prime"]
    times = _grid(opts.get("times"), default_time_grid(gp) if gp > 0 else np.linspace(0, 8, 2000))
    outs = []
    for label, chain in chains:
        g = build_coupling_matrix(chain, model)
        if "initial" in opts:
            c0 = np.array([_complex(v) for v in opts["initial"]])[chain.order]
        else:
            c0 = np.zeros(chain.n, dtype=complex)
            c0[np.flatnonzero(chain.order == 0)[0]] = 1.0
        variants = [(False, g)] + ([(True, zero_offdiagonal(g))] if opts["noninteracting"] else [])
        for free, mat in variants:
            trace = evolve(mat, gp, opts["detuning"], c0, times)
            name = _label("dynamics", label, many, "_noninteracting" if free else "")
            outs.append(_Output(name, "dynamics", trace.columns, list(trace.rows()),
                                dict(trace.metadata, chain=label, noninteracting=free), trace))
    return outs


def _eit(cfg, model, chains, many):
    opts = cfg["analyses"]["eit"]
    gp = cfg["chain"]["gamma_prime"]
    geo = cfg["chain"]["geometry"]
    spacing = opts.get("spacing", geo.get("spacing"))
    outs = []
    for label, chain in chains:
        g = build_coupling_matrix(chain, model)
        modes = decompose(g)
        grid = _grid(opts.get("grid"), None)
        if grid is None:
            grid = np.linspace(-4.0 * opts["omega_c"], 4.0 * opts["omega_c"], 2001)
        table = eit_transmission(grid, modes, gp, opts["omega_c"])
        k = keff_exact(grid, modes, gp, opts["omega_c"], spacing)
        result = EITSpectrum(grid, table.t, k, spacing)
        coeffs = keff_coefficients(g, gp, opts["omega_c"], spacing)
        meta = dict(table.metadata, chain=label, spacing=spacing,
                    keff_series=[[c.real, c.imag] for c in coeffs])
        outs.append(_Output(_label("eit", label, many), "eit", result.columns,
                            list(result.rows()), meta, result))
    return outs


def _greens(cfg, model):
    opts = cfg["analyses"]["greens"]
    x = _grid(opts["grid"], None)
    xx, pp = np.meshgrid(x, x, indexing="ij")
    ref = np.full(xx.shape, np.nan + 0j)
    mspec = cfg["model"]
    meta = {"model": mspec["type"], "reference": opts["reference"]}
    if mspec["type"] == "layered":
        omega = opts.get("omega", mspec["omega"])
        sol = HelmholtzSolution(model.stack, omega)
        values = sol.green(xx, pp)
        meta["omega"] = omega
        if opts["reference"] == "vacuum":
            k = sol.k_out
            ref = 1j * np.exp(1j * k * np.abs(xx - pp)) / (2 * k) / model.stack.area
        elif opts["reference"] == "two_mirror":
            ref = _two_mirror_reference(model.stack, omega, xx, pp)
    else:
        if opts["reference"] != "none":
            raise ConfigError("references are available for layered models only",
                              "analyses.greens.reference")
        values = model.coupling(xx, pp, opts.get("omega"))
    rows = zip(xx.ravel(), pp.ravel(), values.real.ravel(), values.imag.ravel(),
               ref.real.ravel(), ref.imag.ravel())
    columns = ("x", "xp", "re_G", "im_G", "re_ref", "im_ref")
    return [_Output("greens.csv", "greens", columns, list(rows), meta, values)]


def _two_mirror_reference(stack, omega, xx, pp):
    """Closed-form cavity Green's function with reflectivities taken from the mirrors."""
    slabs = stack.slabs
    if len(slabs) != 3 or slabs[0] != slabs[2] or complex(slabs[1].permittivity) != stack.outer_permittivity:
        raise ConfigError("two-mirror reference needs a mirror/gap/mirror stack",
                          "analyses.greens.reference")
    mirror = LayeredStack((slabs[0],), stack.outer_permittivity, stack.area)
    _, r_from_left, r_from_right = HelmholtzSolution(mirror, omega).scattering()
    z0 = stack.boundaries[1]
    length = slabs[1].thickness
    k = HelmholtzSolution(stack, omega).k_out
    inside = (xx >= z0) & (xx <= z0 + length) & (pp >= z0) & (pp <= z0 + length)
    ref = np.full(xx.shape, np.nan + 0j)
    ref[inside] = cavity_green_two_mirror(xx[inside] - z0, pp[inside] - z0, k, length,
                                          r_from_right, r_from_left, stack.area)
    return ref


def _fano(cfg):
    opts = cfg["analyses"]["fano"]
    gp = cfg["chain"]["gamma_prime"]
    g1 = cfg["model"]["gamma_1d"]
    grid = _grid(opts.get("grid"), default_detuning_grid(gp, [g1]))
    outs = []
    for ratio in opts["j_ratios"]:
        j = ratio * g1
        params = fano(j, g1, gp)
        direct = transmission_product(grid, [complex(j, 0.5 * g1)], gp)
        rows = zip(grid, params.transmittance(grid), direct.transmittance)
        outs.append(_Output(f"fano_j{ratio:g}.csv", "fano", ("detuning", "T_fano", "T_direct"),
                            list(rows), {"j_ratio": ratio, "q": params.q}, params))
    return outs


def _beer_lambert(cfg, chains):
    opts = cfg["analyses"]["beer_lambert"]
    gp = cfg["chain"]["gamma_prime"]
    g1 = cfg["model"]["gamma_1d"]
    n = chains[0][1].n
    grid = _grid(opts.get("grid"), default_detuning_grid(gp, [n * g1]))
    res = beer_lambert(grid, n, g1, gp)
    return [_Output("beer_lambert.csv", "beer_lambert", res.columns, list(res.rows()),
                    {"optical_depth": res.optical_depth, "n": n}, res)]


def _nonmarkov(cfg, chains, pool):
    opts = cfg["analyses"]["nonmarkov"]
    mspec = cfg["model"]
    gp = cfg["chain"]["gamma_prime"]
    positions = chains[0][1].positions
    variants = opts.get("sweep") or [{"kappa": mspec["kappa"],
                                      "cavity_detuning_ratio": mspec["cavity_detuning_ratio"]}]
    grid = _grid(opts.get("grid"), None)
    if grid is None:
        grid = default_detuning_grid(gp, [positions.size * mspec["gamma_1d"]])

    def one(v):
        kappa = v["kappa"]
        g0 = np.sqrt(mspec["gamma_1d"] * kappa / 4.0)
        model = frequency_dependent_cavity(positions, g0, kappa, grid, mspec["k_c"],
                                           v["cavity_detuning_ratio"] * kappa)
        return nonmarkov_spectrum(grid, model, gp, opts["markov_detuning"])

    results = list(pool.map(one, variants))
    many = len(variants) > 1
    outs = []
    for i, (v, (nm, mk)) in enumerate(zip(variants, results)):
        name = f"nonmarkov_{i + 1:02d}.csv" if many else "nonmarkov.csv"
        rows = zip(grid, nm.transmittance, mk.transmittance)
        outs.append(_Output(name, "nonmarkov", ("detuning", "T", "T_markov"), list(rows),
                            dict(v, n=int(positions.size)), (nm, mk)))
    return outs


# -- driver ----------------------------------------------------------------


def run_scenario(config, out_dir=None, threads=None, analyses=None, write=True):
    """Run the analyses of a loaded scenario and write CSV and metadata files.

    Parameters
    ----------
    config : dict
        Output of :func:`load_config`.
    out_dir : path-like, optional
        Overrides ``output.directory``.
    threads : int, optional
        Worker cap for independent sweep points and variants.
    analyses : iterable of str, optional
        Subset of the configured analyses to run.

    Raises
    ------
    ScenarioError
        Wrapping any computational failure, with the analysis named.
    """
    digest = config_hash(config)
    directory = Path(out_dir if out_dir is not None else config["output"]["directory"])
    wanted = [a for a in ANALYSES if a in config["analyses"]
              and (analyses is None or a in analyses)]
    outputs = []
    with ThreadPoolExecutor(max_workers=threads or 1) as pool:
        for name in wanted:
            try:
                outputs.extend(_run_one(name, config, pool))
            except ConfigError:
                raise
            except Quasi1DError as exc:
                raise ScenarioError(f"{name}: {exc}", getattr(exc, "operation", name)) from exc
    files = []
    meta_files = {}
    if write:
        directory.mkdir(parents=True, exist_ok=True)
    for out in outputs:
        path = directory / out.name
        if write:
            write_csv(path, out.columns, out.rows, digest)
        files.append(path)
        meta_files[out.name] = _jsonable(dict(out.metadata, analysis=out.analysis,
                                              rows=len(out.rows), columns=list(out.columns)))
    metadata = {"config_sha256": digest, "package_version": __version__,
                "config": {k: v for k, v in config.items() if k != "output"},
                "files": meta_files}
    if write:
        with open(directory / "metadata.json", "w", newline="\n") as fh:
            fh.write(json.dumps(metadata, sort_keys=True, indent=2) + "\n")
    tables = {out.name: out.table for out in outputs}
    return ScenarioResult(config, digest, directory, files, tables, metadata)


def _run_one(name, cfg, pool):
    model = build_model(cfg["model"])
    chains = build_chains(cfg["chain"])
    many = len(chains) > 1
    log.info("running %s on %d chain(s)", name, len(chains))
    if name == "spectrum":
        return _spectrum(cfg, model, chains, many)
    if name == "modes":
        return _modes(cfg, model, chains, many, pool)
    if name == "dynamics":
        return _dynamics(cfg, model, chains, many)
    if name == "eit":
        return _eit(cfg, model, chains, many)
    if name == "greens":
        return _greens(cfg, model)
    if name == "fano":
        return _fano(cfg)
    if name == "beer_lambert":
        return _beer_lambert(cfg, chains)
    if name == "nonmarkov":
        return _nonmarkov(cfg, chains, pool)
    raise ConfigError(f"unknown analysis {name!r}", "analyses")
