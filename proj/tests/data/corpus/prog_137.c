#include <stdio.h>
void blend(int *sum, int *total)
{
    int prev = *sum;
    *sum = *total;
    *total = prev;
}
int main(void)
{
    int sum = 60;
    int total = 3;
    blend(&sum, &total);
    printf("%d %d\n", sum, total);
    return 0;
}
