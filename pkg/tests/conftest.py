import numpy as np
import pytest

from clickpoint import IcpParams
from clickpoint.trajlog import SessionLog, TrajectorySample, TrialLog

STUDY1 = IcpParams(c_mu=0.129, c_sigma=0.0873, nu=14.532, delta=0.461)
STUDY2 = IcpParams(c_mu=0.241, c_sigma=0.093, nu=25.33, delta=0.337)


@pytest.fixture
def study1_params():
    return STUDY1


@pytest.fixture
def study2_params():
    return STUDY2


def build_trial(trial_id, t, pointer, target, width, prev_clicks=(), success=True):
    """TrialLog from plain arrays; the final sample is the click."""
    t = np.asarray(t, dtype=float)
    pointer = np.asarray(pointer, dtype=float)
    target = np.asarray(target, dtype=float)
    samples = [
        TrajectorySample(
            t=float(t[i]),
            pointer_x=float(pointer[i, 0]),
            pointer_y=float(pointer[i, 1]),
            target_x=float(target[i, 0]),
            target_y=float(target[i, 1]),
        )
        for i in range(len(t))
    ]
    return TrialLog(
        trial_id=trial_id,
        samples=samples,
        target_width_W=width,
        click_time=float(t[-1]),
        click_pointer_xy=(float(pointer[-1, 0]), float(pointer[-1, 1])),
        success=success,
        prev_click_times=list(prev_clicks),
    )


def build_session(trials, session_id="s", rate=125.0, dpi=None):
    return SessionLog(session_id=session_id, sampling_rate_f=rate, trials=trials, device_dpi=dpi)
