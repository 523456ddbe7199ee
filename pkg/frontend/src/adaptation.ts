// Applies a server-produced action set to the document. This module is the
// only place visual adaptation happens, and it decides nothing itself: every
// change is a direct reading of the action set (plus the stored preference
// colors, which the preferred_color and weather_time themes point at).

export type ActionValue = string | number | boolean | null;
export type ActionSet = Record<string, ActionValue>;

export interface Preferences {
  font_color: string;
  background_color: string;
  button_font_color: string;
  button_background_color: string;
  time_based_background: boolean;
}

export const DEFAULT_PREFERENCES: Preferences = {
  font_color: "#000000",
  background_color: "#FFFFFF",
  button_font_color: "#000000",
  button_background_color: "#FFFFFF",
  time_based_background: true,
};

const WEATHER_GLYPHS: Record<string, string> = {
  sunny: "☀️",
  cloudy: "☁️",
  rainy: "🌧️",
  snowy: "❄️",
};

const IMAGE_CLASSES = ["bg-day", "bg-sunset", "bg-night"];
const LAYOUT_CLASSES = ["layout-portrait", "layout-landscape"];

function applyColors(root: HTMLElement, colors: {
  font: string; background: string; buttonFont: string; buttonBackground: string;
}): void {
  root.style.setProperty("--font-color", colors.font);
  root.style.setProperty("--background-color", colors.background);
  root.style.setProperty("--button-font-color", colors.buttonFont);
  root.style.setProperty("--button-background-color", colors.buttonBackground);
}

function clearImage(root: HTMLElement): void {
  root.classList.remove(...IMAGE_CLASSES);
}

function hideIcon(icon: HTMLElement): void {
  icon.hidden = true;
  icon.textContent = "";
}

/**
 * Render an action set. Only features present in the set change anything
 * (an empty set is the identity); a `theme` entry re-baselines the icon and
 * background image, since each theme fully specifies both.
 */
export function renderAdaptation(
  actions: ActionSet,
  preferences: Preferences,
  root: HTMLElement,
  icon: HTMLElement,
): void {
  if ("theme" in actions) {
    hideIcon(icon);
    clearImage(root);
    const theme = actions["theme"];
    if (theme === "default") {
      applyColors(root, {
        font: "#000000", background: "#FFFFFF",
        buttonFont: "#000000", buttonBackground: "#FFFFFF",
      });
    } else if (theme === "preferred_color" || theme === "weather_time") {
      applyColors(root, {
        font: preferences.font_color,
        background: preferences.background_color,
        buttonFont: preferences.button_font_color,
        buttonBackground: preferences.button_background_color,
      });
    } else {
      console.warn(`unknown theme token ignored: ${String(theme)}`);
    }
  }

  for (const [feature, value] of Object.entries(actions)) {
    switch (feature) {
      case "theme":
        break; // handled above
      case "weather_icon":
        if (value === null) {
          hideIcon(icon);
        } else if (typeof value === "string" && value in WEATHER_GLYPHS) {
          icon.hidden = false;
          icon.textContent = WEATHER_GLYPHS[value];
          icon.dataset.kind = value;
        } else {
          console.warn(`unknown weather icon ignored: ${String(value)}`);
        }
        break;
      case "background_image":
        clearImage(root);
        if (value === "day" || value === "sunset" || value === "night") {
          root.classList.add(`bg-${value}`);
        } else if (value !== null && value !== "color_style") {
          console.warn(`unknown background image ignored: ${String(value)}`);
        }
        break;
      case "orientation_mode":
        if (value === "portrait" || value === "landscape") {
          root.classList.remove(...LAYOUT_CLASSES);
          root.classList.add(`layout-${value}`);
        } else {
          console.warn(`unknown orientation mode ignored: ${String(value)}`);
        }
        break;
      default:
        // forward compatibility: servers may learn new features first
        console.warn(`unknown adaptation feature ignored: ${feature}`);
    }
  }
}
