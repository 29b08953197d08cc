#include "multicolor/tensor_bridge.hpp"

#include <stdexcept>

namespace multicolor {

namespace {

template <int C>
torch::Tensor image_to_tensor(const Image<C>& img) {
    auto hwc = torch::from_blob(const_cast<float*>(img.data().data()), {img.height(), img.width(), C},
                                torch::kFloat32);
    return hwc.permute({2, 0, 1}).contiguous();
}

template <int C>
Image<C> image_from_tensor(const torch::Tensor& t) {
    torch::Tensor chw = t.dim() == 4 ? t.squeeze(0) : t;
    if (chw.dim() != 3 || chw.size(0) != C) {
        throw std::invalid_argument("image_from_tensor: expected " + std::to_string(C) + " x H x W");
    }
    auto hwc = chw.detach().to(torch::kCPU, torch::kFloat32).permute({1, 2, 0}).contiguous();
    const auto h = static_cast<int>(hwc.size(0));
    const auto w = static_cast<int>(hwc.size(1));
    const float* p = hwc.data_ptr<float>();
    return Image<C>(h, w, std::vector<float>(p, p + hwc.numel()));
}

template <typename Img>
torch::Tensor stack(std::span<const Img> images) {
    if (images.empty()) throw std::invalid_argument("stack_images: empty batch");
    std::vector<torch::Tensor> parts;
    parts.reserve(images.size());
    for (const auto& img : images) {
        if (!img.same_shape(images.front())) throw std::invalid_argument("stack_images: size mismatch");
        parts.push_back(image_to_tensor(img));
    }
    return torch::stack(parts);
}

}  // namespace

torch::Tensor to_tensor(const RgbImage& img) { return image_to_tensor(img); }
torch::Tensor to_tensor(const GrayImage& img) { return image_to_tensor(img); }
torch::Tensor to_tensor(const ChannelPair& pair) { return image_to_tensor(pair.channels); }

torch::Tensor stack_images(std::span<const RgbImage> images) { return stack(images); }
torch::Tensor stack_images(std::span<const GrayImage> images) { return stack(images); }

torch::Tensor stack_pairs(std::span<const ChannelPair> pairs) {
    if (pairs.empty()) throw std::invalid_argument("stack_pairs: empty batch");
    std::vector<torch::Tensor> parts;
    for (const auto& p : pairs) parts.push_back(to_tensor(p));
    return torch::stack(parts);
}

RgbImage rgb_from_tensor(const torch::Tensor& t) { return image_from_tensor<3>(t); }
GrayImage gray_from_tensor(const torch::Tensor& t) { return image_from_tensor<1>(t); }

ChannelPair pair_from_tensor(const torch::Tensor& t, ColorSpace space) {
    return ChannelPair{image_from_tensor<2>(t), space, true};
}

torch::Tensor luma(const torch::Tensor& rgb) {
    if (rgb.dim() != 4 || rgb.size(1) != 3) throw std::invalid_argument("luma: expected B x 3 x H x W");
    return 0.299 * rgb.slice(1, 0, 1) + 0.587 * rgb.slice(1, 1, 2) + 0.114 * rgb.slice(1, 2, 3);
}

}  // namespace multicolor
