#pragma once

#include "wernerlab/tensorspace.hpp"
#include "wernerlab/spectral.hpp"
#include "wernerlab/forms.hpp"
#include "wernerlab/werner.hpp"
#include "wernerlab/ensembles.hpp"
#include "wernerlab/search.hpp"
#include "wernerlab/io.hpp"
#include "wernerlab/suites.hpp"
