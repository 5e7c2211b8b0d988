import copy

from dotenv import load_dotenv

from g2moduli.default_config import DEFAULT_CONFIG
from g2moduli.dynamics.trajectory_engine import TrajectoryEngine
from g2moduli.instantons.local_families import Family, seed_jet
from g2moduli.moduli.boundary import locate_boundary
from g2moduli.moduli.classifier import classify

# Load environment variables from .env file
load_dotenv()

# Create a custom config
config = copy.deepcopy(DEFAULT_CONFIG)
config["seed"]["t_max"] = 500.0  # Shorter horizon
config["fit"]["min_time"] = 50.0  # Fit window [50, 500]
config["integrator"]["method"] = "DOP853"  # Options: DOP853, RK45

engine = TrajectoryEngine(config)

# One member of each family
for family, parameter in ((Family.TPRIME, 0.5), (Family.T_GAMMA, 1.0), (Family.TPRIME, 1.2)):
    record = classify(engine.integrate(seed_jet(family, parameter)), config)
    print(family.label, parameter, record.outcome.value, record.mu, record.nu, record.t_escape)

# Edge of the T' moduli space
print(locate_boundary(Family.TPRIME, (0.5, 1.5), 1e-3, config).gamma_crit)
