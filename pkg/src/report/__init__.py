from .writers import (
    TOOL_VERSION,
    CSV_COLUMNS,
    RunManifest,
    csv_row,
    append_csv,
    write_json,
    write_manifest,
    render_svg,
    write_svg,
)
