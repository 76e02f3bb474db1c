from .base import KFState, init_state, kf_predict, kf_update

__all__ = ["KFState", "init_state", "kf_predict", "kf_update"]
