"""Independent brute-force reference implementations used to check the library.

Everything here is deliberately slow and literal: plain loops, direct
formulas, exhaustive scans. None of it shares code with the package.
"""

import math

import numpy as np


def otsu_scan(values, nbins=256):
    """Exhaustive Otsu: try every split, direct per-split sums.

    Returns (best_split_index, best_between_class_variance, bin_edges).
    """
    lo = float(np.min(values))
    hi = float(np.max(values))
    hist, edges = np.histogram(values, bins=nbins, range=(lo, hi))
    p = hist.astype(float) / hist.sum()
    centers = (edges[:-1] + edges[1:]) / 2.0
    best_k, best_var = None, -math.inf
    for k in range(nbins - 1):
        w0 = float(np.sum(p[: k + 1]))
        w1 = float(np.sum(p[k + 1 :]))
        if w0 <= 0 or w1 <= 0:
            continue
        mu0 = float(np.sum(p[: k + 1] * centers[: k + 1])) / w0
        mu1 = float(np.sum(p[k + 1 :] * centers[k + 1 :])) / w1
        var = w0 * w1 * (mu0 - mu1) ** 2
        if var > best_var:
            best_var = var
            best_k = k
    return best_k, best_var, edges


def split_variance(values, split_idx, nbins=256):
    """Between-class variance of one particular split, computed directly."""
    lo = float(np.min(values))
    hi = float(np.max(values))
    hist, edges = np.histogram(values, bins=nbins, range=(lo, hi))
    p = hist.astype(float) / hist.sum()
    centers = (edges[:-1] + edges[1:]) / 2.0
    k = split_idx
    w0 = float(np.sum(p[: k + 1]))
    w1 = float(np.sum(p[k + 1 :]))
    if w0 <= 0 or w1 <= 0:
        return -math.inf
    mu0 = float(np.sum(p[: k + 1] * centers[: k + 1])) / w0
    mu1 = float(np.sum(p[k + 1 :] * centers[k + 1 :])) / w1
    return w0 * w1 * (mu0 - mu1) ** 2


def nearest_resample(src_water, src_valid, src_geom, tgt_geom):
    """Per-target-pixel scan over every source center; ties to smaller row, col."""
    h, w = tgt_geom.height_px, tgt_geom.width_px
    sh, sw = src_geom.height_px, src_geom.width_px
    water = np.zeros((h, w), dtype=bool)
    valid = np.zeros((h, w), dtype=bool)
    xmin, ymin, xmax, ymax = src_geom.bounds()
    for r in range(h):
        for c in range(w):
            tx = tgt_geom.origin_x + (c + 0.5) * tgt_geom.pixel_size
            ty = tgt_geom.origin_y - (r + 0.5) * tgt_geom.pixel_size
            if not (xmin <= tx <= xmax and ymin <= ty <= ymax):
                continue
            best = None
            for sr in range(sh):
                for sc in range(sw):
                    sx = src_geom.origin_x + (sc + 0.5) * src_geom.pixel_size
                    sy = src_geom.origin_y - (sr + 0.5) * src_geom.pixel_size
                    d = (tx - sx) ** 2 + (ty - sy) ** 2
                    key = (d, sr, sc)
                    if best is None or key < best:
                        best = key
            _, sr, sc = best
            water[r, c] = src_water[sr, sc]
            valid[r, c] = src_valid[sr, sc]
    return water, valid


def bilinear_point(plane, valid, src_geom, x, y):
    """Direct bilinear formula at one map point; None when it must fall back."""
    col_f = (x - src_geom.origin_x) / src_geom.pixel_size - 0.5
    row_f = (src_geom.origin_y - y) / src_geom.pixel_size - 0.5
    r0 = math.floor(row_f)
    c0 = math.floor(col_f)
    fy = row_f - r0
    fx = col_f - c0
    r1 = r0 if fy == 0 else r0 + 1
    c1 = c0 if fx == 0 else c0 + 1
    corners = [(r0, c0), (r0, c1), (r1, c0), (r1, c1)]
    for r, c in corners:
        if not (0 <= r < src_geom.height_px and 0 <= c < src_geom.width_px):
            return None
        if not valid[r, c]:
            return None
    v00 = plane[r0, c0]
    v01 = plane[r0, c1]
    v10 = plane[r1, c0]
    v11 = plane[r1, c1]
    return (v00 * (1 - fx) + v01 * fx) * (1 - fy) + (v10 * (1 - fx) + v11 * fx) * fy


def dense_sample_cells(p0, p1, geom, step):
    """Cells visited by densely sampled points along segment p0->p1 (floor mapping)."""
    x0, y0 = p0
    x1, y1 = p1
    length = math.hypot(x1 - x0, y1 - y0)
    n = max(2, int(math.ceil(length / step)) + 1)
    cells = []
    seen = set()
    for i in range(n + 1):
        t = i / n
        x = x0 + t * (x1 - x0)
        y = y0 + t * (y1 - y0)
        col = math.floor((x - geom.origin_x) / geom.pixel_size)
        row = math.floor((geom.origin_y - y) / geom.pixel_size)
        if (row, col) not in seen:
            seen.add((row, col))
            cells.append((row, col))
    return cells


def segment_box_cells(p0, p1, geom, pad=2, inflate=0.0):
    """Every cell whose closed square the segment intersects (exact predicate).

    Scans a padded bounding box of cells; cells may lie outside the grid.
    ``inflate`` grows each square by that many map units on every side.
    """

    def intersects(cell_row, cell_col):
        # cell square in map coords
        x_lo = geom.origin_x + cell_col * geom.pixel_size - inflate
        x_hi = x_lo + geom.pixel_size + 2 * inflate
        y_hi = geom.origin_y - cell_row * geom.pixel_size + inflate
        y_lo = y_hi - geom.pixel_size - 2 * inflate
        (x0, y0), (x1, y1) = p0, p1
        dx = x1 - x0
        dy = y1 - y0
        t_lo, t_hi = 0.0, 1.0
        for d, start, lo, hi in ((dx, x0, x_lo, x_hi), (dy, y0, y_lo, y_hi)):
            if d == 0:
                if start < lo or start > hi:
                    return False
            else:
                ta = (lo - start) / d
                tb = (hi - start) / d
                if ta > tb:
                    ta, tb = tb, ta
                t_lo = max(t_lo, ta)
                t_hi = min(t_hi, tb)
                if t_lo > t_hi:
                    return False
        return True

    (x0, y0), (x1, y1) = p0, p1
    c_lo = math.floor((min(x0, x1) - geom.origin_x) / geom.pixel_size) - pad
    c_hi = math.floor((max(x0, x1) - geom.origin_x) / geom.pixel_size) + pad
    r_lo = math.floor((geom.origin_y - max(y0, y1)) / geom.pixel_size) - pad
    r_hi = math.floor((geom.origin_y - min(y0, y1)) / geom.pixel_size) + pad
    cells = set()
    for r in range(r_lo, r_hi + 1):
        for c in range(c_lo, c_hi + 1):
            if intersects(r, c):
                cells.add((r, c))
    return cells


def bce_pixelwise(prob, water, valid, eps=1e-7):
    """Per-pixel loop BCE with the same clamping convention."""
    total = 0.0
    n = 0
    h, w = prob.shape
    for r in range(h):
        for c in range(w):
            if not valid[r, c]:
                continue
            y = 1.0 if water[r, c] else 0.0
            yhat = min(max(prob[r, c], eps), 1.0 - eps)
            total += -(y * math.log(yhat) + (1 - y) * math.log(1 - yhat))
            n += 1
    return total / n


def confusion_pixelwise(pred_water, pred_valid, gt_water, gt_valid):
    """Per-pixel loop confusion counts over jointly valid pixels."""
    tp = fp = fn = tn = 0
    h, w = pred_water.shape
    for r in range(h):
        for c in range(w):
            if not (pred_valid[r, c] and gt_valid[r, c]):
                continue
            p = pred_water[r, c]
            g = gt_water[r, c]
            if p and g:
                tp += 1
            elif p and not g:
                fp += 1
            elif not p and g:
                fn += 1
            else:
                tn += 1
    return tp, fp, fn, tn


def width_stats_streaming(pairs, max_width=500.0):
    """Recompute the four width statistics with running sums and a sort."""
    kept = [(p, t) for p, t in pairs if t <= max_width]
    n = len(kept)
    sum_err = 0.0
    sum_abs = 0.0
    sum_pct = 0.0
    n_pct = 0
    abs_errs = []
    for p, t in kept:
        e = p - t
        sum_err += e
        sum_abs += abs(e)
        abs_errs.append(abs(e))
        if t > 0:
            sum_pct += e / t
            n_pct += 1
    abs_errs.sort()
    if n % 2 == 1:
        median = abs_errs[n // 2]
    else:
        median = (abs_errs[n // 2 - 1] + abs_errs[n // 2]) / 2.0
    return {
        "n": n,
        "bias": sum_err / n,
        "pct_bias": (sum_pct / n_pct) if n_pct else math.nan,
        "mean_abs": sum_abs / n,
        "median_abs": median,
    }


def fp_class_counts(pred_water, pred_valid, gt_water, gt_valid, lulc):
    """Loop-count land-cover ids under false positives."""
    counts = {}
    h, w = pred_water.shape
    for r in range(h):
        for c in range(w):
            if not (pred_valid[r, c] and gt_valid[r, c]):
                continue
            if pred_water[r, c] and not gt_water[r, c]:
                key = int(lulc[r, c])
                counts[key] = counts.get(key, 0) + 1
    return counts
