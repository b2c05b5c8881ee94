"""Full-matrix AdaGrad with a recursive estimate of the inverse square root
of the gradient covariance, weighted-averaged iterates and a streaming
block variant, plus the benchmark harness that exercises them."""

from .linalg import (eig_extremes, frobenius_distance, inv_sqrt_eig, mat_vec,
                     quad_form)
from .schedules import LogWeightAverager, PowerSchedule, decay, growth
from .precond import PrecondState, precond_init
from .optim import (GradientBlock, OptimizerState, init_state, run_optimizer,
                    apply_step, sgd_step, adagrad_diag_step,
                    full_adagrad_step, wafa_step, swafa_step)
from .models import (LinearModel, LogisticModel, finite_diff_grad,
                     linear_grad, logistic_grad, logistic_predict)
from .data import (GaussianLinearSource, LabeledSample, block_iter,
                   load_libsvm, make_toeplitz_cov, parse_libsvm_line,
                   sample_theta_star, train_test_split)

__version__ = "0.1.0"

__all__ = [
    "eig_extremes", "frobenius_distance", "inv_sqrt_eig", "mat_vec",
    "quad_form", "LogWeightAverager", "PowerSchedule", "decay", "growth",
    "PrecondState", "precond_init", "GradientBlock", "OptimizerState",
    "init_state", "run_optimizer", "apply_step", "sgd_step",
    "adagrad_diag_step", "full_adagrad_step", "wafa_step", "swafa_step",
    "LinearModel", "LogisticModel", "finite_diff_grad", "linear_grad",
    "logistic_grad", "logistic_predict", "GaussianLinearSource",
    "LabeledSample", "block_iter", "load_libsvm", "make_toeplitz_cov",
    "parse_libsvm_line", "sample_theta_star", "train_test_split",
]
