"""Shared helpers for the test suite: small random instance generation.

Instances are built directly (not via the scenario generator) so low-level
tests do not depend on higher layers.  Senders land uniformly in a square
whose side is chosen small enough that links actually interfere; link
lengths stay within one distance unit so the default power rule keeps
every link decodable on its own.
"""

import math

import numpy as np

from linksched.radio import (
    Link,
    NetworkInstance,
    Node,
    RadioParams,
    default_tx_power,
)


def random_instance(
    seed,
    n_links,
    area=6.0,
    alpha=4.0,
    beta=10.0,
    noise=1e-9,
    min_length=0.2,
    max_length=1.0,
    rates=None,
):
    rng = np.random.default_rng(seed)
    nodes = []
    links = []
    used = set()
    for i in range(n_links):
        while True:
            sx = float(rng.uniform(0.0, area))
            sy = float(rng.uniform(0.0, area))
            length = float(rng.uniform(min_length, max_length))
            angle = float(rng.uniform(0.0, 2.0 * math.pi))
            rx = sx + length * math.cos(angle)
            ry = sy + length * math.sin(angle)
            if (sx, sy) in used or (rx, ry) in used or (sx, sy) == (rx, ry):
                continue
            used.add((sx, sy))
            used.add((rx, ry))
            break
        nodes.append(Node(2 * i, sx, sy))
        nodes.append(Node(2 * i + 1, rx, ry))
        rate = 1.0 if rates is None else float(rates[i])
        links.append(Link(i, 2 * i, 2 * i + 1, rate))
    radio = RadioParams(
        alpha=alpha,
        beta=beta,
        noise=noise,
        tx_power=default_tx_power(beta, noise),
    )
    return NetworkInstance(nodes=tuple(nodes), links=tuple(links), radio=radio)


def diversity_instance(seed, n_links, k, area=12.0):
    """Random instance whose length-diversity exponent is exactly ``k``.

    The longest link is pinned to one distance unit and the shortest to
    1 / (1.4 * 2**k), so the max/min ratio is 1.4 * 2**k and its log2
    floors to k with margin on both sides.  Remaining lengths draw
    uniformly between the pins and cannot disturb the extremes.
    """
    if n_links < 2:
        raise ValueError("need at least two links to pin both extremes")
    rng = np.random.default_rng(seed)
    d_min = 1.0 / (1.4 * 2.0**k)
    nodes = []
    links = []
    used = set()
    for i in range(n_links):
        if i == 0:
            length = 1.0
        elif i == 1:
            length = d_min
        else:
            length = float(rng.uniform(d_min, 1.0))
        while True:
            sx = float(rng.uniform(0.0, area))
            sy = float(rng.uniform(0.0, area))
            angle = float(rng.uniform(0.0, 2.0 * math.pi))
            rx = sx + length * math.cos(angle)
            ry = sy + length * math.sin(angle)
            if (sx, sy) in used or (rx, ry) in used or (sx, sy) == (rx, ry):
                continue
            used.add((sx, sy))
            used.add((rx, ry))
            break
        nodes.append(Node(2 * i, sx, sy))
        nodes.append(Node(2 * i + 1, rx, ry))
        links.append(Link(i, 2 * i, 2 * i + 1))
    radio = RadioParams(
        alpha=4.0, beta=10.0, noise=1e-9, tx_power=default_tx_power(10.0, 1e-9)
    )
    return NetworkInstance(nodes=tuple(nodes), links=tuple(links), radio=radio)


def accumulation_grid():
    """3x3 grid of parallel unit links where interference only hurts in sum.

    Spacing (3.6, 2.4) at alpha = 3 puts every sender-to-foreign-receiver
    distance at 2.6 or more (outside a 2.5 disk) and keeps every pairwise
    SINR above 17, yet the center link sees aggregate SINR ~ 4.1 when all
    nine fire together.  Disk and pairwise schedulers co-schedule the lot;
    only aggregate-aware ones split it.
    """
    nodes = []
    links = []
    for i in range(3):
        for j in range(3):
            idx = 3 * i + j
            nodes.append(Node(2 * idx, 3.6 * i, 2.4 * j))
            nodes.append(Node(2 * idx + 1, 3.6 * i + 1.0, 2.4 * j))
            links.append(Link(idx, 2 * idx, 2 * idx + 1))
    radio = RadioParams(
        alpha=3.0, beta=10.0, noise=1e-9, tx_power=default_tx_power(10.0, 1e-9)
    )
    return NetworkInstance(nodes=tuple(nodes), links=tuple(links), radio=radio)
