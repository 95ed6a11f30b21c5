"""riverkit command line tool.

Subcommands: segment, widths, eval-seg, eval-width, synth, split, report.
Every run resolves its parameters (CLI > config file > built-in default),
writes them as ``<command>_config.txt`` next to the outputs, and embeds the
tool version plus a hash of that resolved config in JSON reports. Outputs
carry no timestamps, so re-runs with the same inputs are byte-identical.

Exit codes: 0 success, 2 input validation failure, 3 internal error.

Config files are plain ``key = value`` lines ('#' starts a comment); keys
match the long option names without the leading dashes.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, geoio
from .centerline import parse_centerlines, transect_geojson, make_transect, node_tangent
from .errors import ValidationError
from .ingest import SPLITS, assign_scene_splits, load_manifest, split_by_reach, validate_exclusivity
from .raster import minmax_normalize, resample_class_plane
from .segmentation import fp_attribution, ndwi_from_raster, otsu_threshold, seg_metrics, threshold_mask
from .synth import Radiometry, RiverShape, SynthSpec, gen_scene, sweep
from .width import DEFAULT_HALF_LENGTH, DEFAULT_MAX_WIDTH, WIDTH_MODES, width_error_stats, widths_for_scene

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INTERNAL = 3


def fmt6(x: float):
    """Round a float to 6 significant digits (report serialization rule)."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return None
    return float(f"{float(x):.6g}")


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"cannot parse boolean from '{text}'")


def _parse_float_list(text: str) -> list[float]:
    return [float(v) for v in str(text).split(",") if v.strip()]


def load_config_file(path: str) -> dict[str, str]:
    if not os.path.isfile(path):
        raise ValidationError(f"config file not found: {path}")
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


class RunConfig:
    """Resolves option values (CLI > config file > default) and records them."""

    def __init__(self, args, command: str):
        self.command = command
        self.file_values = load_config_file(args.config) if getattr(args, "config", None) else {}
        self.args = args
        self.resolved: dict[str, str] = {"command": command, "version": __version__}

    def get(self, name: str, cast, default):
        attr = name.replace("-", "_")
        value = getattr(self.args, attr, None)
        if value is None:
            if name in self.file_values:
                value = cast(self.file_values[name])
            else:
                value = default
        self.record(name, value)
        return value

    def record(self, name: str, value):
        if isinstance(value, (list, tuple)):
            text = ",".join(str(v) for v in value)
        else:
            text = str(value)
        self.resolved[name] = text

    def text(self) -> str:
        lines = [f"{k} = {self.resolved[k]}" for k in sorted(self.resolved)]
        return "\n".join(lines) + "\n"

    def hash(self) -> str:
        return hashlib.sha256(self.text().encode()).hexdigest()[:12]

    def write(self, directory: str) -> None:
        os.makedirs(directory, exist_ok=True)
        with open(os.path.join(directory, f"{self.command}_config.txt"), "w") as fh:
            fh.write(self.text())


def _write_json(path: str, payload: dict) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _scene_stem(path: str) -> str:
    base = os.path.basename(os.path.normpath(path))
    return os.path.splitext(base)[0]


# ---------------------------------------------------------------------------
# segment


def _segment_one(path, out_dir, green, nir, threshold, nbins, normalize):
    raster = geoio.load_raster(path)
    if normalize:
        raster = minmax_normalize(raster)
    field = ndwi_from_raster(raster, green=green, nir=nir)
    t = threshold if threshold is not None else otsu_threshold(field, nbins=nbins)
    mask = threshold_mask(field, t)
    stem = _scene_stem(path)
    geoio.write_mask_geotiff(mask, os.path.join(out_dir, f"{stem}_mask.tif"))
    geoio.write_field_geotiff(
        field.values, field.validity, field.geometry, os.path.join(out_dir, f"{stem}_ndwi.tif")
    )
    return stem, t


def cmd_segment(args) -> int:
    cfg = RunConfig(args, "segment")
    out_dir = cfg.get("out", str, None)
    if not out_dir:
        raise ValidationError("segment: --out directory is required")
    green = cfg.get("green", str, "green")
    nir = cfg.get("nir", str, "nir")
    threshold = cfg.get("threshold", float, None)
    nbins = cfg.get("nbins", int, 256)
    normalize = cfg.get("normalize", _parse_bool, True)
    workers = cfg.get("workers", int, int(os.environ.get("RIVER_NUM_WORKERS", "1")))
    cfg.record("rasters", list(args.rasters))

    os.makedirs(out_dir, exist_ok=True)
    results = []
    if workers > 1 and len(args.rasters) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_segment_one, p, out_dir, green, nir, threshold, nbins, normalize)
                for p in args.rasters
            ]
            results = [f.result() for f in futures]
    else:
        results = [
            _segment_one(p, out_dir, green, nir, threshold, nbins, normalize)
            for p in args.rasters
        ]
    cfg.write(out_dir)
    for stem, t in sorted(results):
        print(f"scene={stem} threshold={t:.6g}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# widths


def cmd_widths(args) -> int:
    cfg = RunConfig(args, "widths")
    out_csv = cfg.get("out", str, None)
    if not out_csv:
        raise ValidationError("widths: --out CSV path is required")
    half_length = cfg.get("half-length", float, DEFAULT_HALF_LENGTH)
    mode = cfg.get("width-mode", str, "pixel-count")
    exclude_flagged = cfg.get("exclude-flagged", _parse_bool, False)
    transect_out = cfg.get("transect-geojson", str, "")
    cfg.record("mask", args.mask)
    cfg.record("centerlines", args.centerlines)
    if mode not in WIDTH_MODES:
        raise ValidationError(f"widths: unknown --width-mode '{mode}'")

    mask = geoio.read_mask(args.mask)
    reaches = parse_centerlines(args.centerlines)
    estimates, skipped = widths_for_scene(mask, reaches, half_length=half_length, mode=mode)
    if exclude_flagged:
        estimates = [e for e in estimates if not e.flagged]

    out_dir = os.path.dirname(os.path.abspath(out_csv))
    os.makedirs(out_dir, exist_ok=True)
    with open(out_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_id", "reach_id", "width_m", "water_px", "mode", "flags"])
        for e in estimates:
            writer.writerow(
                [e.node_id, e.reach_id, f"{e.width_m:.6g}", e.water_px, e.mode, ";".join(e.flag_names())]
            )

    if transect_out:
        transects = []
        for reach in reaches:
            for idx, node in enumerate(reach.nodes):
                try:
                    tangent = node_tangent(reach, idx)
                except ValidationError:
                    continue
                transects.append(make_transect(node, tangent, half_length))
        _write_json(transect_out, transect_geojson(transects))

    cfg.write(out_dir)
    print(f"estimates={len(estimates)} skipped={skipped}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval-seg


def cmd_eval_seg(args) -> int:
    cfg = RunConfig(args, "eval-seg")
    out_json = cfg.get("out", str, None)
    if not out_json:
        raise ValidationError("eval-seg: --out JSON path is required")
    scene_id = cfg.get("scene-id", str, _scene_stem(args.pred))
    lulc_path = cfg.get("lulc", str, "")
    cfg.record("pred", args.pred)
    cfg.record("gt", args.gt)

    pred = geoio.read_mask(args.pred)
    gt = geoio.read_mask(args.gt)
    metrics = seg_metrics(pred, gt)
    payload = {
        "scene_id": scene_id,
        "tp": metrics.tp,
        "fp": metrics.fp,
        "fn": metrics.fn,
        "tn": metrics.tn,
        "precision": fmt6(metrics.precision),
        "recall": fmt6(metrics.recall),
        "f1": fmt6(metrics.f1),
        "tool_version": __version__,
        "config_hash": cfg.hash(),
    }
    if lulc_path:
        lulc_raster = geoio.load_raster(lulc_path)
        plane = next(iter(lulc_raster.bands.values()))
        if lulc_raster.geometry != pred.geometry:
            plane, _ = resample_class_plane(
                np.asarray(plane), lulc_raster.geometry, pred.geometry
            )
        attribution = fp_attribution(pred, gt, np.asarray(plane))
        payload["fp_attribution"] = {k: fmt6(v) for k, v in attribution.shares.items()}
        payload["fp_total"] = attribution.fp_total
    _write_json(out_json, payload)
    cfg.write(os.path.dirname(os.path.abspath(out_json)))
    print(f"scene={scene_id} f1={metrics.f1:.6g}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval-width


def _read_width_csv(path: str) -> dict[str, dict]:
    if not os.path.isfile(path):
        raise ValidationError(f"width CSV not found: {path}")
    rows = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "node_id" not in reader.fieldnames or "width_m" not in reader.fieldnames:
            raise ValidationError(f"{path}: width CSV needs node_id and width_m columns")
        for row in reader:
            node_id = row["node_id"]
            if node_id in rows:
                raise ValidationError(f"{path}: duplicate node_id '{node_id}'")
            rows[node_id] = {
                "width_m": float(row["width_m"]),
                "flags": [f for f in (row.get("flags") or "").split(";") if f],
            }
    return rows


def cmd_eval_width(args) -> int:
    cfg = RunConfig(args, "eval-width")
    out_json = cfg.get("out", str, None)
    if not out_json:
        raise ValidationError("eval-width: --out JSON path is required")
    max_width = cfg.get("max-width", float, DEFAULT_MAX_WIDTH)
    exclude_flagged = cfg.get("exclude-flagged", _parse_bool, False)
    method = cfg.get("method", str, _scene_stem(args.pred_csv).replace("_widths", ""))
    cfg.record("pred-csv", args.pred_csv)
    cfg.record("gt-csv", args.gt_csv)

    pred_rows = _read_width_csv(args.pred_csv)
    gt_rows = _read_width_csv(args.gt_csv)
    shared = sorted(set(pred_rows) & set(gt_rows))
    if not shared:
        raise ValidationError("eval-width: no node_ids shared between pred and gt CSVs")

    quality_flags = {"truncated_at_boundary", "contains_nodata"}
    n_flagged = sum(1 for n in shared if quality_flags & set(pred_rows[n]["flags"]))
    if exclude_flagged:
        shared = [n for n in shared if not quality_flags & set(pred_rows[n]["flags"])]
        if not shared:
            raise ValidationError("eval-width: all shared nodes are flagged")
    pairs = [(pred_rows[n]["width_m"], gt_rows[n]["width_m"]) for n in shared]
    stats = width_error_stats(pairs, max_width=max_width)

    payload = {
        "method": method,
        "n_nodes": stats.n_nodes,
        "bias_m": fmt6(stats.bias_m),
        "pct_bias": fmt6(stats.pct_bias),
        "mean_abs_m": fmt6(stats.mean_abs_m),
        "median_abs_m": fmt6(stats.median_abs_m),
        "n_excluded_gt_over_500": stats.n_excluded_gt_over_max,
        "n_zero_gt": stats.n_zero_gt,
        "n_flagged": n_flagged,
        "tool_version": __version__,
        "config_hash": cfg.hash(),
    }
    _write_json(out_json, payload)
    cfg.write(os.path.dirname(os.path.abspath(out_json)))
    print(
        f"method={method} n={stats.n_nodes} bias={stats.bias_m:.6g} "
        f"median_abs={stats.median_abs_m:.6g}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# synth


def _centerline_feature_collection(reach) -> dict:
    features = []
    for order, node in enumerate(reach.nodes):
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [node.x, node.y]},
                "properties": {
                    "node_id": node.node_id,
                    "reach_id": node.reach_id,
                    "order": order,
                    "ref_widths": node.ref_widths,
                },
            }
        )
    return {"type": "FeatureCollection", "features": features}


def cmd_synth(args) -> int:
    cfg = RunConfig(args, "synth")
    out_dir = cfg.get("out", str, None)
    if not out_dir:
        raise ValidationError("synth: --out directory is required")
    seed = cfg.get("seed", int, 0)
    pixel_size = cfg.get("pixel-size", float, 3.0)
    scene_px = cfg.get("scene-px", int, 500)
    do_sweep = cfg.get("sweep", _parse_bool, False)
    os.makedirs(out_dir, exist_ok=True)

    if do_sweep:
        widths = cfg.get("widths", _parse_float_list, [30.0, 90.0, 150.0, 300.0, 450.0])
        n_orient = cfg.get("orientations", int, 16)
        orientations = [k * math.pi / n_orient for k in range(n_orient)]
        trials = cfg.get("trials", int, 2)
        rows = sweep(widths, orientations, pixel_size, trials=trials, seed=seed, scene_px=scene_px)
        sweep_csv = os.path.join(out_dir, "sweep.csv")
        with open(sweep_csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            header = ["width_m", "orientation_rad", "n_measurements", "max_abs_err_m", "mean_abs_err_m", "median_abs_err_m"]
            writer.writerow(header)
            for row in rows:
                writer.writerow(
                    [f"{row['width_m']:.6g}", f"{row['orientation_rad']:.6g}", row["n_measurements"]]
                    + [f"{row[k]:.6g}" for k in header[3:]]
                )
        cfg.write(out_dir)
        worst = max(row["max_abs_err_m"] for row in rows)
        print(f"sweep rows={len(rows)} max_abs_err={worst:.6g}")
        return EXIT_OK

    river = RiverShape(
        kind=cfg.get("kind", str, "straight"),
        width_m=cfg.get("width", float, 90.0),
        orientation_rad=cfg.get("orientation", float, 0.0),
        amplitude_m=cfg.get("amplitude", float, 0.0),
        wavelength_m=cfg.get("wavelength", float, 0.0),
        center_offset_m=cfg.get("offset", float, 0.0),
    )
    radiometry = Radiometry(
        water_green=cfg.get("water-green", float, Radiometry().water_green),
        water_nir=cfg.get("water-nir", float, Radiometry().water_nir),
        land_green=cfg.get("land-green", float, Radiometry().land_green),
        land_nir=cfg.get("land-nir", float, Radiometry().land_nir),
        noise_sd=cfg.get("noise-sd", float, 0.0),
    )
    spec = SynthSpec(
        river=river,
        scene_px=scene_px,
        pixel_size=pixel_size,
        radiometry=radiometry,
        seed=seed,
        node_spacing_m=cfg.get("node-spacing", float, 200.0),
    )
    scene = gen_scene(spec)
    geoio.write_npy_stack(scene.raster, os.path.join(out_dir, "bands"))
    geoio.write_mask_geotiff(scene.gt_mask, os.path.join(out_dir, "gt_mask.tif"))
    _write_json(os.path.join(out_dir, "centerline.geojson"), _centerline_feature_collection(scene.reach))
    with open(os.path.join(out_dir, "gt_widths.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_id", "width_m"])
        for node in scene.reach.nodes:
            writer.writerow([node.node_id, f"{scene.analytic_width(node):.6g}"])
    cfg.write(out_dir)
    print(f"scene nodes={len(scene.reach.nodes)} extent_m={spec.extent_m:.6g}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# split


def cmd_split(args) -> int:
    cfg = RunConfig(args, "split")
    out_csv = cfg.get("out", str, None)
    if not out_csv:
        raise ValidationError("split: --out CSV path is required")
    fractions = cfg.get("fractions", _parse_float_list, [0.7, 0.15, 0.15])
    seed = cfg.get("seed", int, 0)
    cfg.record("manifest", args.manifest)

    records = load_manifest(args.manifest)
    assignment = split_by_reach(records, fractions=tuple(fractions), seed=seed)
    warnings = assign_scene_splits(records, assignment)
    report = validate_exclusivity(records, assignment)

    out_dir = os.path.dirname(os.path.abspath(out_csv))
    os.makedirs(out_dir, exist_ok=True)
    with open(out_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["reach_id", "split"])
        for reach_id in sorted(assignment.by_reach):
            writer.writerow([reach_id, assignment.by_reach[reach_id]])
    cfg.write(out_dir)

    counts = assignment.counts()
    print(" ".join(f"{name}={counts[name]}" for name in SPLITS))
    for message in warnings:
        print(f"warning: {message}", file=sys.stderr)
    if not report.ok:
        for reach, splits in report.violations:
            print(f"violation: reach {reach} appears in {splits}", file=sys.stderr)
    print(f"violations={len(report.violations)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# report


def cmd_report(args) -> int:
    cfg = RunConfig(args, "report")
    prefix = cfg.get("out-prefix", str, None)
    if not prefix:
        raise ValidationError("report: --out-prefix is required")
    cfg.record("inputs", list(args.evals))

    rows = []
    for path in args.evals:
        if not os.path.isfile(path):
            raise ValidationError(f"report: no such eval JSON: {path}")
        with open(path) as fh:
            try:
                payload = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: invalid JSON: {exc}") from exc
        method = payload.get("method") or _scene_stem(path)
        try:
            rows.append(
                {
                    "method": method,
                    "n_nodes": int(payload["n_nodes"]),
                    "bias_m": float(payload["bias_m"]),
                    "pct_bias": payload.get("pct_bias"),
                    "mean_abs_m": float(payload["mean_abs_m"]),
                    "median_abs_m": float(payload["median_abs_m"]),
                }
            )
        except KeyError as exc:
            raise ValidationError(f"{path}: eval JSON missing field {exc}") from exc
    rows.sort(key=lambda r: (r["median_abs_m"], r["method"]))

    columns = ["method", "n_nodes", "bias_m", "pct_bias", "mean_abs_m", "median_abs_m"]

    def cell(row, col):
        value = row[col]
        if value is None:
            return ""
        if isinstance(value, float):
            return f"{value:.6g}"
        return str(value)

    out_dir = os.path.dirname(os.path.abspath(prefix)) or "."
    os.makedirs(out_dir, exist_ok=True)
    with open(prefix + ".csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([cell(row, c) for c in columns])
    with open(prefix + ".md", "w") as fh:
        fh.write("| " + " | ".join(columns) + " |\n")
        fh.write("|" + "|".join(["---"] * len(columns)) + "|\n")
        for row in rows:
            fh.write("| " + " | ".join(cell(row, c) for c in columns) + " |\n")
        fh.write(f"\n_riverkit {__version__}, config {cfg.hash()}_\n")
    cfg.write(out_dir)
    for row in rows:
        print(f"{row['method']}: median_abs={cell(row, 'median_abs_m')}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="riverkit", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"riverkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p):
        p.add_argument("--config", help="key = value config file; CLI flags win")

    p = sub.add_parser("segment", help="NDWI + Otsu water mask from a raster")
    p.add_argument("rasters", nargs="+", help="GeoTIFF files or npy-stack directories")
    p.add_argument("--out", help="output directory")
    p.add_argument("--green", help="green band name (or sidecar name)")
    p.add_argument("--nir", help="NIR band name")
    p.add_argument("-t", "--threshold", type=float, help="fixed threshold; bypasses Otsu")
    p.add_argument("--nbins", type=int, help="Otsu histogram bins (default 256)")
    p.add_argument("--normalize", dest="normalize", action="store_const", const=True, default=None,
                   help="min-max normalize bands per image before NDWI (default)")
    p.add_argument("--no-normalize", dest="normalize", action="store_const", const=False)
    p.add_argument("--workers", type=int, help="parallel scenes (default $RIVER_NUM_WORKERS or 1)")
    add_config(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("widths", help="per-node river widths from a water mask")
    p.add_argument("mask", help="water mask (GeoTIFF or npy-stack)")
    p.add_argument("centerlines", help="centerline nodes GeoJSON")
    p.add_argument("--out", help="output CSV path")
    p.add_argument("--half-length", type=float, help="transect half length in m (default 500)")
    p.add_argument("--width-mode", choices=WIDTH_MODES, help="counting mode (default pixel-count)")
    p.add_argument("--exclude-flagged", action="store_const", const=True, default=None,
                   help="drop truncated/nodata-affected estimates")
    p.add_argument("--transect-geojson", help="also write transect lines for debugging")
    add_config(p)
    p.set_defaults(func=cmd_widths)

    p = sub.add_parser("eval-seg", help="segmentation metrics between two masks")
    p.add_argument("pred", help="predicted mask")
    p.add_argument("gt", help="ground-truth mask")
    p.add_argument("--lulc", help="land-cover class raster for FP attribution")
    p.add_argument("--scene-id", help="scene id for the report")
    p.add_argument("--out", help="output JSON path")
    add_config(p)
    p.set_defaults(func=cmd_eval_seg)

    p = sub.add_parser("eval-width", help="width error statistics pred vs ground truth")
    p.add_argument("pred_csv", help="predicted widths CSV (node_id,width_m[,flags])")
    p.add_argument("gt_csv", help="ground-truth widths CSV (node_id,width_m)")
    p.add_argument("--max-width", type=float, help="drop nodes with truth above this (default 500)")
    p.add_argument("--exclude-flagged", action="store_const", const=True, default=None)
    p.add_argument("--method", help="method label for reports")
    p.add_argument("--out", help="output JSON path")
    add_config(p)
    p.set_defaults(func=cmd_eval_width)

    p = sub.add_parser("synth", help="generate a synthetic river scene (or error sweep)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--kind", choices=["straight", "sine"])
    p.add_argument("--width", type=float, help="river width in m")
    p.add_argument("--orientation", type=float, help="river axis angle in radians")
    p.add_argument("--amplitude", type=float, help="sine amplitude in m")
    p.add_argument("--wavelength", type=float, help="sine wavelength in m")
    p.add_argument("--offset", type=float, help="lateral axis offset in m")
    p.add_argument("--scene-px", type=int, help="scene size in pixels (default 500)")
    p.add_argument("--pixel-size", type=float, help="pixel size in m (default 3)")
    p.add_argument("--noise-sd", type=float, help="per-band Gaussian noise sd")
    p.add_argument("--water-green", type=float)
    p.add_argument("--water-nir", type=float)
    p.add_argument("--land-green", type=float)
    p.add_argument("--land-nir", type=float)
    p.add_argument("--node-spacing", type=float, help="centerline node spacing in m (default 200)")
    p.add_argument("--seed", type=int)
    p.add_argument("--sweep", action="store_const", const=True, default=None,
                   help="write a width-error sweep table instead of a scene")
    p.add_argument("--widths", type=_parse_float_list, help="sweep widths, comma separated")
    p.add_argument("--orientations", type=int, help="sweep orientation count over [0, pi)")
    p.add_argument("--trials", type=int, help="sweep trials per combination")
    add_config(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("split", help="reach-exclusive train/val/test split")
    p.add_argument("manifest", help="scene manifest (JSON or CSV)")
    p.add_argument("--fractions", type=_parse_float_list,
                   help="train,val,test fractions (default 0.7,0.15,0.15)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output CSV path (reach_id,split)")
    add_config(p)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("report", help="comparison table from eval-width JSONs")
    p.add_argument("evals", nargs="+", help="eval JSON files")
    p.add_argument("--out-prefix", help="write <prefix>.csv and <prefix>.md")
    add_config(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # anything else is a bug, not bad input
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
