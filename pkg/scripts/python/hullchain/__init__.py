"""Nested convex hulls compiled into width-one perceptron chains."""
