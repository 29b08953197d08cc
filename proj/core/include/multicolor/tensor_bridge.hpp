#pragma once

#include <span>

#include <torch/torch.h>

#include "multicolor/colorspace.hpp"
#include "multicolor/image.hpp"

namespace multicolor {

/// HWC image -> CHW float tensor.
torch::Tensor to_tensor(const RgbImage& img);
torch::Tensor to_tensor(const GrayImage& img);
torch::Tensor to_tensor(const ChannelPair& pair);

/// Stacks equally sized images into B x C x H x W.
torch::Tensor stack_images(std::span<const RgbImage> images);
torch::Tensor stack_images(std::span<const GrayImage> images);
torch::Tensor stack_pairs(std::span<const ChannelPair> pairs);

/// Accepts C x H x W or 1 x C x H x W.
RgbImage rgb_from_tensor(const torch::Tensor& t);
GrayImage gray_from_tensor(const torch::Tensor& t);
ChannelPair pair_from_tensor(const torch::Tensor& t, ColorSpace space);

/// BT.601 luma of a B x 3 x H x W batch, returned as B x 1 x H x W.
torch::Tensor luma(const torch::Tensor& rgb);

}  // namespace multicolor
