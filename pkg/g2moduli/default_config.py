import os

DEFAULT_CONFIG = {
    "results_dir": os.getenv("G2MODULI_RESULTS_DIR", "./results"),
    # Batch scans: 1 runs probes sequentially in-process
    "workers": int(os.getenv("G2MODULI_WORKERS", "1")),
    # Closed-form metric helpers
    "metric": {
        "quad_tol": 1e-12,      # t_of_r quadrature tolerance
        "fd_step": 1e-5,        # central-difference step for Hitchin residuals
    },
    # Adaptive stepper (scipy embedded Runge-Kutta pair)
    "integrator": {
        "method": "DOP853",     # Options: DOP853, RK45
        "rtol": 1e-10,
        "atol": 1e-12,
        "first_step": None,     # None lets the stepper choose
        "max_step": None,       # None means unbounded
        "max_steps": 200000,
        "samples_per_decade": 100,
    },
    # Series seeding at the singular orbit
    "seed": {
        "t0": 1e-2,
        "series_radius": 0.05,
        "t_max": 1e3,
    },
    # Termination events
    "events": {
        "escape_threshold": 1e3,
        "convergence_radius": 1e-3,
        "convergence_min_time": 50.0,
        "invariance_band": 1e-9,
        "stop_on_convergence": False,
        "regions": ["H_PLUS", "H_MINUS", "R_ZERO", "R_INFINITY"],
    },
    # Tail fit for the decay rate
    "fit": {
        "min_time": 50.0,
        "window_fraction": 0.1,   # T_fit = max(min_time, window_fraction * t_max)
        "min_samples": 50,
        "underflow": 1e-14,
    },
    # Boundary bisection
    "boundary": {
        "tol": 1e-3,
        "max_iter": 60,
        "use_reflection": True,
    },
    # Parameter grids for scans
    "grids": {
        "tprime": {"start": -1.5, "stop": 1.5, "step": 0.05},
        "tgamma": {"start": -0.2, "stop": 1.0, "step": 0.05},
    },
    # Phase portrait (shifted coordinates)
    "portrait": {
        "window": [-1.0, 1.0, -1.0, 1.0],
        "grid_points": 21,
        "streamline_seeds": 7,
        "streamline_steps": 400,
        "streamline_time": 4.0,
        "fan": [0.0, 0.25, 0.5, 0.75, 1.0],
    },
}
