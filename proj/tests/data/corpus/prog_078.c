#include <stdio.h>
int check(const char *size)
{
    int c = 0;
    while (size[c] != '\0') {
        c++;
    }
    return c;
}
int main(void)
{
    char size[32] = "repair";
    int m = check(size);
    printf("%d\n", m);
    return 0;
}
