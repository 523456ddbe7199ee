// Orientation as reported to the server: the viewport aspect ratio, unless
// the desk-testing override pins it.

export type Orientation = "portrait" | "landscape";
export type OrientationOverride = Orientation | "auto";

export function viewportOrientation(width: number, height: number): Orientation {
  return width >= height ? "landscape" : "portrait";
}

export function effectiveOrientation(
  override: OrientationOverride,
  width: number,
  height: number,
): Orientation {
  return override === "auto" ? viewportOrientation(width, height) : override;
}
