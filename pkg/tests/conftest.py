import numpy as np

from crnkit.simulate import BlowUp, Completed, IntegrateOptions, integrate


def safe_growth_trajectory(sys, x0, t_max=1.0, seed=0):
    """Integrate an autocatalytic system, backing off to 60% of the time at
    which the total grows a hundredfold (or blows up), so identity samples
    stay in the well-conditioned regime."""
    opts = IntegrateOptions(t_max=t_max, rtol=1e-10, atol=1e-12, seed=seed)
    traj = integrate(sys, x0, opts)
    total = traj.states.sum(axis=1)
    if isinstance(traj.outcome, BlowUp):
        t_star = traj.outcome.t_detect
    else:
        over = np.nonzero(total > 100 * total[0])[0]
        if over.size == 0:
            return traj
        t_star = float(traj.times[over[0]])
    opts = IntegrateOptions(t_max=0.6 * t_star, rtol=1e-10, atol=1e-12, seed=seed)
    traj = integrate(sys, x0, opts)
    assert isinstance(traj.outcome, Completed)
    return traj
