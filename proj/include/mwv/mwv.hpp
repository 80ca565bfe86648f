#ifndef MWV_MWV_HPP
#define MWV_MWV_HPP

#include "geometry.hpp"
#include "harness.hpp"
#include "models.hpp"
#include "mwvd.hpp"
#include "overlay.hpp"
#include "prefix_cells.hpp"

#endif // MWV_MWV_HPP
