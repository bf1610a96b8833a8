"""Singularity propagation by cut Hugoniot-type ODE chains."""
