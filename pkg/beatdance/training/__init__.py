from .batch import TrainBatch, TripletBatch, build_batch, build_triplets
from .dataset import DanceDataset, base_id
from .losses import loss_foot, loss_rec, total_loss
from .trainer import TrainResult, lr_at, moving_average, run_ablation, train, training_step

__all__ = [
    "TrainBatch",
    "TripletBatch",
    "build_batch",
    "build_triplets",
    "DanceDataset",
    "base_id",
    "loss_foot",
    "loss_rec",
    "total_loss",
    "TrainResult",
    "lr_at",
    "moving_average",
    "run_ablation",
    "train",
    "training_step",
]
