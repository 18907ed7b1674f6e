"""Operator/Machine Channel Interface"""
from .channels import Direction, ControlSignals, FeedbackFrame

__all__ = ["Direction", "ControlSignals", "FeedbackFrame"]
