"""Desk-scale convolutional backbone and the goal / subsidiary classification heads."""

import torch
from torch import nn
from torch.nn.utils.parametrizations import weight_norm


def conv_block(in_channels: int, out_channels: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(in_channels, out_channels, kernel_size=3, padding=1, bias=False),
        nn.BatchNorm2d(out_channels),
        nn.ReLU(inplace=True),
        nn.MaxPool2d(2),
    )


class Backbone(nn.Module):
    """
    h: stacked conv blocks, global average pooling and a projection to `feature_dim`.
    `forward_tap` also returns the output of the penultimate block, where the
    subsidiary head branches off.
    """

    def __init__(self, channels: list[int], feature_dim: int, in_channels: int = 3):
        super().__init__()
        widths = [in_channels, *channels]
        self.blocks = nn.ModuleList(conv_block(a, b) for a, b in zip(widths[:-1], widths[1:], strict=True))
        self.pool = nn.AdaptiveAvgPool2d(1)
        self.project = nn.Sequential(
            nn.Linear(channels[-1], feature_dim),
            nn.BatchNorm1d(feature_dim),
            nn.ReLU(inplace=True),
        )
        self.tap_channels = channels[-2]
        self.feature_dim = feature_dim

    def forward_tap(self, x: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        for block in self.blocks[:-1]:
            x = block(x)
        tap = x
        x = self.blocks[-1](x)
        return tap, self.project(self.pool(x).flatten(1))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.forward_tap(x)[1]


class GoalHead(nn.Module):
    """f_g: batch-normed bottleneck followed by a weight-normalized classifier."""

    def __init__(self, feature_dim: int, bottleneck_dim: int, n_classes: int):
        super().__init__()
        self.bottleneck = nn.Sequential(nn.Linear(feature_dim, bottleneck_dim), nn.BatchNorm1d(bottleneck_dim))
        self.classifier = weight_norm(nn.Linear(bottleneck_dim, n_classes))

    def forward(self, z: torch.Tensor) -> torch.Tensor:
        return self.classifier(self.bottleneck(z))


class SubsidiaryHead(nn.Module):
    """
    f_n: its own copy of a final conv block on the penultimate backbone features,
    then the goal-head structure with |C_n| + 1 outputs (the last one is the OOS node).
    Average- and max-pooled block responses are concatenated before the bottleneck.
    """

    def __init__(self, tap_channels: int, block_channels: int, bottleneck_dim: int, n_classes: int):
        super().__init__()
        self.block = conv_block(tap_channels, block_channels)
        self.avg_pool = nn.AdaptiveAvgPool2d(1)
        self.max_pool = nn.AdaptiveMaxPool2d(1)
        self.bottleneck = nn.Sequential(
            nn.Linear(2 * block_channels, bottleneck_dim),
            nn.BatchNorm1d(bottleneck_dim),
            nn.ReLU(inplace=True),
        )
        self.classifier = weight_norm(nn.Linear(bottleneck_dim, n_classes + 1))
        self.n_outputs = n_classes + 1

    def forward(self, tap: torch.Tensor) -> torch.Tensor:
        x = self.block(tap)
        x = torch.cat([self.avg_pool(x), self.max_pool(x)], dim=1).flatten(1)
        return self.classifier(self.bottleneck(x))
