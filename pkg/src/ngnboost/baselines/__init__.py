"""Benchmark classifiers and feature selectors."""

from .classifiers import (
    CARTModel,
    LRModel,
    NBModel,
    cart_fit,
    cart_predict,
    gini,
    lr_fit,
    lr_loss_and_grad,
    lr_predict,
    lr_predict_proba,
    nb_fit,
    nb_predict,
)
from .selectors import (
    SelectorResult,
    apply_selector,
    chi2_scores,
    chi2_select,
    chi2_statistic,
    lasso_coefficients,
    lasso_select,
    ngn_select,
    pca_apply,
    pca_select,
    raw_select,
)

__all__ = [
    "NBModel",
    "LRModel",
    "CARTModel",
    "nb_fit",
    "nb_predict",
    "lr_fit",
    "lr_predict",
    "lr_predict_proba",
    "lr_loss_and_grad",
    "cart_fit",
    "cart_predict",
    "gini",
    "SelectorResult",
    "apply_selector",
    "raw_select",
    "chi2_statistic",
    "chi2_scores",
    "chi2_select",
    "pca_select",
    "pca_apply",
    "lasso_coefficients",
    "lasso_select",
    "ngn_select",
]
