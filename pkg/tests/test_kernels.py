"""Numba lane vs numpy lane agreement, and in-kernel blow-up detection."""

import os
import subprocess
import sys

import numpy as np
import pytest

from conftest import cos_field
from spdekit import _kernels
from spdekit.integrators import BlowUpError, SchemeSpec, simulate
from spdekit.models import AdditiveHeat, TransportHeat
from spdekit.noise import CovarianceSpec, NoiseSampler
from spdekit.spectral import SpectralField, TorusGrid

LANE_SCRIPT = """
import numpy as np
import sys
from spdekit.integrators import simulate, SchemeSpec
from spdekit.models import TransportHeat, AdditiveHeat
from spdekit.noise import NoiseSampler, CovarianceSpec
from spdekit.spectral import TorusGrid, field_from_modes

g = TorusGrid(16)
u0 = field_from_modes(g, [(1, 0.5), (3, 0.1 + 0.2j)])
out = []
cases = [
    (TransportHeat(g, (1.0,)), "euler_maruyama"),
    (TransportHeat(g, (0.5,)), "heun_stratonovich"),
    (TransportHeat(g, (1.0,)), "exponential_euler"),
    (AdditiveHeat(CovarianceSpec.power(g, 1.0)), "euler_maruyama"),
    (AdditiveHeat(CovarianceSpec.power(g, 1.0)), "exact_ou"),
]
for model, scheme in cases:
    spec = CovarianceSpec.white(g) if isinstance(model, TransportHeat) else model.q
    s = NoiseSampler(spec, 3, 1)
    p = simulate(model, SchemeSpec(scheme, 1e-4), u0, 0.01, sampler=s)
    out.append(p.states)
np.save(sys.argv[1], np.stack(out))
"""


@pytest.mark.skipif(not _kernels.NUMBA_ENABLED, reason="numba lane not active")
def test_lanes_agree_bit_for_bit(tmp_path):
    files = {}
    for lane, env_extra in (("numba", {}), ("numpy", {"SPDEKIT_DISABLE_NUMBA": "1"})):
        out = tmp_path / f"{lane}.npy"
        env = dict(os.environ, **env_extra)
        subprocess.run(
            [sys.executable, "-c", LANE_SCRIPT, str(out)], env=env, check=True, timeout=300
        )
        files[lane] = np.load(out)
    assert np.array_equal(files["numba"], files["numpy"])


def test_blow_up_detected_in_hot_loop():
    # explicit EM far beyond the stability limit of the top mode
    g = TorusGrid(32)
    m = TransportHeat(g, (0.0,))
    u0 = SpectralField(g, np.ones(33, dtype=np.complex128))
    s = NoiseSampler(CovarianceSpec.white(g), 1)
    with pytest.raises(BlowUpError) as err:
        simulate(m, SchemeSpec("euler_maruyama", 1e-2), u0, 1.0, sampler=s)
    assert err.value.time <= 1.0


def test_env_flag_reflected_in_module():
    # the active process was started without the flag, so numba should be on
    # unless the environment explicitly disabled it
    disabled = os.environ.get("SPDEKIT_DISABLE_NUMBA", "").lower() in ("1", "true", "yes", "on")
    assert _kernels.NUMBA_ENABLED == (not disabled)
