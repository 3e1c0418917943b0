"""Simulator and control stack for a limbless crawling soft robot.

Subpackages:

* :mod:`crawlsim.oscillator` -- discrete two-neuron rhythm generator,
  frequency calibration, region extraction, phase delays.
* :mod:`crawlsim.gait` -- locomotion-mode to valve-command tables.
* :mod:`crawlsim.plant` -- three-node friction-anisotropic body dynamics.
* :mod:`crawlsim.world` -- planar arena, pose kinematics, proximity cones.
* :mod:`crawlsim.teleop` -- assisted-teleoperation arbitration.
* :mod:`crawlsim.service` -- tick engine, record/replay, experiments,
  WebSocket server, CLI.
* :mod:`crawlsim.kernels` -- compiled/pure numerical backends.
"""

from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
