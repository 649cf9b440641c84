from .density import US_BOUNDS, Bounds, DensityGrid, bin_density, bin_points
from .svg import (CoefEntry, CoefPlotSpec, plot_coefficients, plot_density, plot_histogram,
                  plot_scatter_with_fits)
from .tables import (TableDoc, anova_doc, coefficient_doc, counts_doc, descriptives_doc,
                     dunn_doc, fmt_num, fmt_p, gof_doc, kruskal_doc, render_table, shapiro_doc,
                     stars, welch_doc)

__all__ = [
    "US_BOUNDS", "Bounds", "DensityGrid", "bin_density", "bin_points",
    "CoefEntry", "CoefPlotSpec", "plot_coefficients", "plot_density", "plot_histogram",
    "plot_scatter_with_fits",
    "TableDoc", "anova_doc", "coefficient_doc", "counts_doc", "descriptives_doc", "dunn_doc",
    "fmt_num", "fmt_p", "gof_doc", "kruskal_doc", "render_table", "shapiro_doc", "stars",
    "welch_doc",
]
