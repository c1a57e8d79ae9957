#pragma once

#include <vector>

// Frozen f_y tables on 00001110110 for y = 10 (top) and y = 3 (bottom), row-major.
namespace fixture {

inline const std::vector<int> kFig2Top = {
    1,  2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 3, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11,  //
    3,  4, 3, 4, 5, 6, 7, 8, 9, 10, 11, 5, 4, 5, 4, 5, 6, 7, 8, 9, 10, 11,  //
    5,  5, 5, 5, 5, 6, 7, 8, 9, 10, 11, 6, 6, 6, 6, 6, 6, 7, 8, 9, 10, 11,  //
    7,  7, 7, 7, 7, 6, 7, 8, 9, 10, 11, 7, 7, 7, 7, 7, 6, 7, 8, 9, 10, 11,  //
    8,  7, 8, 7, 7, 6, 7, 8, 9, 10, 11, 8, 9, 8, 7, 7, 6, 7, 8, 9, 10, 11,  //
    10, 9, 8, 7, 7, 6, 7, 8, 9, 10, 11};
inline const std::vector<int> kFig2Bottom = {
    1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 3, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11,  //
    3, 4, 3, 4, 5, 6, 7, 8, 9, 10, 11, 5, 4, 5, 4, 5, 6, 7, 8, 9, 10, 11,  //
    5, 5, 5, 5, 5, 6, 7, 8, 9, 10, 11, 6, 6, 6, 6, 6, 6, 7, 8, 9, 10, 11,  //
    5, 5, 5, 5, 5, 6, 7, 8, 9, 10, 11, 5, 5, 5, 5, 5, 6, 7, 8, 9, 10, 11,  //
    5, 5, 5, 5, 5, 6, 7, 8, 9, 10, 11, 5, 4, 5, 5, 5, 6, 7, 8, 9, 10, 11,  //
    3, 4, 5, 5, 5, 6, 7, 8, 9, 10, 11};

}  // namespace fixture
