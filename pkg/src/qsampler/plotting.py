"""Figure renderers for the CLI artifacts.  Every function returns a
matplotlib Figure; the CLI saves them as PNG next to the delimited data."""

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .diagnostics import cue_surmise_pdf, porter_thomas_cdf  # noqa: E402


def _empirical_cdf(values):
    x = np.sort(np.asarray(values, dtype=float))
    y = np.arange(1, x.size + 1) / x.size
    return x, y


def plot_eigenphases(phases):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.step(np.arange(len(phases)), phases, where="mid", lw=1)
    ax.set_xlabel("index")
    ax.set_ylabel(r"eigenphase $\theta_j$")
    ax.set_ylim(0, 2 * np.pi)
    fig.tight_layout()
    return fig


def plot_spacings(spacings, literal_curve=False):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.hist(spacings, bins=40, density=True, alpha=0.6, color="tab:blue",
            label="measured")
    s = np.linspace(0, max(3.0, float(np.max(spacings))), 400)
    ax.plot(s, cue_surmise_pdf(s), "k--", lw=1, label="CUE surmise")
    if literal_curve:
        ax.plot(s, cue_surmise_pdf(s, literal=True), "r:", lw=1, label="unnormalized variant")
    ax.set_xlabel("s")
    ax.set_ylabel("p(s)")
    ax.legend(frameon=False)
    fig.tight_layout()
    return fig


def plot_matrix(values, xlabel="k", ylabel="j", cbar_label=None):
    fig, ax = plt.subplots(figsize=(4.5, 4))
    im = ax.imshow(values, origin="lower", aspect="equal", cmap="viridis")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    cb = fig.colorbar(im, ax=ax, fraction=0.046)
    if cbar_label:
        cb.set_label(cbar_label)
    fig.tight_layout()
    return fig


def plot_porter_thomas(values, N, xlabel="z"):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    x, y = _empirical_cdf(values)
    ax.plot(x, y, lw=1, label="measured")
    zz = np.linspace(0, float(x.max()), 400)
    ax.plot(zz, porter_thomas_cdf(zz, N), "k--", lw=1, label=r"$1 - e^{-Nz}$")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("cumulative fraction")
    ax.legend(frameon=False)
    fig.tight_layout()
    return fig


def plot_ipr_cumulative(values, N, q):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    x, y = _empirical_cdf(values)
    ax.semilogx(x, y, lw=1, label="measured")
    ax.axvline(math.factorial(q) * N ** (1 - q), color="k", ls=":",
               label="Haar mean")
    ax.set_xlabel(rf"$I_{{{q}}}$")
    ax.set_ylabel("cumulative fraction")
    ax.legend(frameon=False)
    fig.tight_layout()
    return fig


def plot_husimi_montage(grids, max_panels=64):
    grids = np.asarray(grids)
    n = min(grids.shape[0], max_panels)
    cols = int(math.ceil(math.sqrt(n)))
    rows = int(math.ceil(n / cols))
    fig, axes = plt.subplots(rows, cols, figsize=(1.3 * cols, 1.3 * rows))
    axes = np.atleast_1d(axes).ravel()
    vmax = grids[:n].max()
    for i, ax in enumerate(axes):
        ax.set_axis_off()
        if i < n:
            ax.imshow(grids[i], origin="lower", vmin=0, vmax=vmax, cmap="magma")
    fig.suptitle(r"Husimi $|\langle \phi_c, p_r|\psi_k\rangle|^2$", fontsize=9)
    fig.tight_layout()
    return fig


def plot_frame_potentials(estimates):
    fig, ax = plt.subplots(figsize=(4.5, 3.5))
    ks = [e.k for e in estimates]
    vals = [e.value for e in estimates]
    errs = [e.std_err for e in estimates]
    ax.errorbar(ks, vals, yerr=errs, fmt="o", capsize=3, label="measured")
    ax.plot(ks, [math.factorial(k) for k in ks], "r:", label="Haar ($k!$)")
    ax.set_yscale("log")
    ax.set_xlabel("k")
    ax.set_ylabel(r"$F^{(k)}$")
    ax.set_xticks(ks)
    ax.legend(frameon=False)
    fig.tight_layout()
    return fig


def plot_poincare(section):
    fig, ax = plt.subplots(figsize=(4.5, 4))
    cmap = plt.get_cmap("tab20")
    for i in range(section.n_orbits):
        pts = section.points[i]
        ax.plot(pts[:, 0], pts[:, 1], ".", ms=0.8, color=cmap(i % 20))
    ax.set_xlim(0, 2 * np.pi)
    ax.set_ylim(0, 2 * np.pi)
    ax.set_xlabel(r"$\phi$")
    ax.set_ylabel(r"$p$")
    fig.tight_layout()
    return fig


def save_figure(fig, path):
    fig.savefig(path, dpi=150)
    plt.close(fig)
