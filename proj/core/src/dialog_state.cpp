#include "qdlm/dialog_state.hpp"

#include <cctype>

namespace qdlm {

bool PlaceholderMap::bind(std::string placeholder, std::string surface) {
  if (placeholder_to_surface_.count(placeholder) || surface_to_placeholder_.count(surface)) {
    return false;
  }
  surface_to_placeholder_[surface] = placeholder;
  placeholder_to_surface_[std::move(placeholder)] = std::move(surface);
  return true;
}

std::optional<std::string> PlaceholderMap::surface_for(const std::string& placeholder) const {
  auto it = placeholder_to_surface_.find(placeholder);
  if (it == placeholder_to_surface_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> PlaceholderMap::placeholder_for(const std::string& surface) const {
  auto it = surface_to_placeholder_.find(surface);
  if (it == surface_to_placeholder_.end()) return std::nullopt;
  return it->second;
}

int placeholder_index(const std::string& token, std::string* suffix) {
  constexpr std::string_view kPrefix = "RESTAURANT_";
  if (token.size() <= kPrefix.size() || token.compare(0, kPrefix.size(), kPrefix) != 0) {
    return 0;
  }
  std::size_t pos = kPrefix.size();
  std::size_t digits_end = pos;
  while (digits_end < token.size() &&
         std::isdigit(static_cast<unsigned char>(token[digits_end]))) {
    ++digits_end;
  }
  if (digits_end == pos) return 0;
  if (digits_end >= token.size() || token[digits_end] != '_') return 0;
  if (digits_end + 1 >= token.size()) return 0;
  int index = std::stoi(token.substr(pos, digits_end - pos));
  if (index <= 0) return 0;
  if (suffix) *suffix = token.substr(digits_end + 1);
  return index;
}

std::string make_placeholder(int index, const std::string& suffix) {
  return "RESTAURANT_" + std::to_string(index) + "_" + suffix;
}

}  // namespace qdlm
