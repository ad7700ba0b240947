#pragma once

#include "unargmax/braid_reflect.hpp"
#include "unargmax/chebyshev.hpp"
#include "unargmax/error.hpp"
#include "unargmax/experiments.hpp"
#include "unargmax/geometry.hpp"
#include "unargmax/model_io.hpp"
#include "unargmax/npy.hpp"
#include "unargmax/oracle.hpp"
#include "unargmax/pipeline.hpp"
#include "unargmax/region_count.hpp"
#include "unargmax/report.hpp"
#include "unargmax/spec.hpp"
#include "unargmax/version.hpp"
